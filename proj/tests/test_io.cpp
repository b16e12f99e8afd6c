#include <filesystem>
#include <fstream>
#include <limits>

#include <unistd.h>

#include "doctest.h"
#include "oracles.hpp"
#include "rankreg/io.hpp"

using namespace rankreg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("rankreg_io_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& content) const {
        std::ofstream(path / name) << content;
        return path / name;
    }
};

} // namespace

TEST_SUITE("io") {

TEST_CASE("csv round trip is exact") {
    TempDir t;
    oracle::TestRng rng(81);
    Mat X = rng.normal_mat(7, 3);
    X(0, 0) = 1e-300;
    X(1, 1) = -0.1;
    write_csv_matrix(t.path / "x.csv", X);
    CHECK(read_csv_matrix(t.path / "x.csv") == X);
    const Vec v = rng.normal_vec(5);
    write_csv_vector(t.path / "v.csv", v);
    CHECK(read_csv_vector(t.path / "v.csv") == v);
}

TEST_CASE("header rows and blank lines are skipped") {
    TempDir t;
    const Mat X = read_csv_matrix(t.write("h.csv", "a,b\n1,2\n\n3, 4\n"));
    REQUIRE(X.rows() == 2);
    CHECK(X(1, 1) == 4.0);
}

TEST_CASE("malformed csv names file and line") {
    TempDir t;
    const auto p = t.write("bad.csv", "1,2\n3,x\n");
    try {
        read_csv_matrix(p);
        FAIL("expected an IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("bad.csv:2") != std::string::npos);
    }
    CHECK_THROWS_AS(read_csv_matrix(t.write("ragged.csv", "1,2\n3\n")), IoError);
    CHECK_THROWS_AS(read_csv_matrix(t.path / "missing.csv"), IoError);
    CHECK_THROWS_AS(read_csv_matrix(t.write("empty.csv", "")), IoError);
    CHECK_THROWS_AS(read_csv_vector(t.write("wide.csv", "1,2\n")), IoError);
}

TEST_CASE("group files") {
    TempDir t;
    const GroupFile f = read_group_file(t.write("g.json", R"({"groups": [[1, 2], [3]], "weights": [2, 0.5]})"));
    REQUIRE(f.groups.size() == 2);
    CHECK(f.groups[0] == std::vector<Index>{0, 1});
    CHECK(f.weights == std::vector<double>{2, 0.5});
    const GroupStructure G = to_group_structure(f, 3, WeightRule::One);
    CHECK(G.weight(1) == 0.5);

    const GroupFile bare = read_group_file(t.write("b.json", "[[2], [1, 3]]"));
    const GroupStructure H = to_group_structure(bare, 3, WeightRule::SqrtSize);
    CHECK(H.weight(1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(H.group_of(0) == 1);

    CHECK_THROWS_AS(read_group_file(t.write("z.json", "[[0]]")), IoError);
    CHECK_THROWS_AS(read_group_file(t.write("w.json", R"({"groups": [[1]], "weights": [1, 2]})")), IoError);
    CHECK_THROWS_AS(read_group_file(t.write("j.json", "{")), IoError);
    CHECK_THROWS_AS(to_group_structure(bare, 4, WeightRule::One), InvalidInput);
}

TEST_CASE("weight rule names and number formatting") {
    for (auto r : {WeightRule::One, WeightRule::SqrtSize, WeightRule::InvSqrtSize})
        CHECK(parse_weight_rule(to_string(r)) == r);
    CHECK_THROWS_AS(parse_weight_rule("log"), InvalidInput);
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    const double x = 1.0 / 3.0;
    CHECK(std::stod(format_double(x)) == x);
}

}
