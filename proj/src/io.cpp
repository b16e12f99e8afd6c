#include "rankreg/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rankreg {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool parse_number(const std::string& field, double& out) {
    if (field.empty()) return false;
    const char* first = field.data();
    if (*first == '+') ++first;
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string() + ": cannot open for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    return out;
}

} // namespace

Mat read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::vector<double> values;
    Index cols = -1;
    Index rows = 0;
    bool first = true;
    std::string line;
    for (Index lineno = 1; std::getline(in, line); ++lineno) {
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        std::vector<double> row(fields.size());
        bool ok = true;
        std::size_t bad = 0;
        for (std::size_t j = 0; j < fields.size() && ok; ++j) {
            ok = parse_number(fields[j], row[j]);
            if (!ok) bad = j;
        }
        if (!ok && first) {  // header
            first = false;
            cols = static_cast<Index>(fields.size());
            continue;
        }
        first = false;
        if (!ok)
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": field " +
                          std::to_string(bad + 1) + " is not a number: '" + fields[bad] + "'");
        if (cols < 0) cols = static_cast<Index>(fields.size());
        if (static_cast<Index>(fields.size()) != cols)
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(cols) + " fields, got " + std::to_string(fields.size()));
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (in.bad()) throw IoError(path.string() + ": read error");
    if (rows == 0) throw IoError(path.string() + ": no data rows");
    Mat X(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) X(i, j) = values[static_cast<std::size_t>(i * cols + j)];
    return X;
}

Vec read_csv_vector(const std::filesystem::path& path) {
    const Mat M = read_csv_matrix(path);
    if (M.cols() != 1)
        throw IoError(path.string() + ": expected a single column, got " + std::to_string(M.cols()));
    return M.col(0);
}

GroupFile read_group_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(path.string() + ": invalid JSON: " + e.what());
    }
    const nlohmann::json* groups = &j;
    const nlohmann::json* weights = nullptr;
    if (j.is_object()) {
        if (!j.contains("groups")) throw IoError(path.string() + ": missing \"groups\"");
        groups = &j["groups"];
        if (j.contains("weights")) weights = &j["weights"];
    }
    if (!groups->is_array()) throw IoError(path.string() + ": \"groups\" must be an array");
    GroupFile out;
    for (std::size_t l = 0; l < groups->size(); ++l) {
        const auto& g = (*groups)[l];
        if (!g.is_array()) throw IoError(path.string() + ": group " + std::to_string(l + 1) + " is not an array");
        std::vector<Index> members;
        for (const auto& v : g) {
            if (!v.is_number_integer() || v.get<long long>() < 1)
                throw IoError(path.string() + ": group " + std::to_string(l + 1) +
                              " has an entry that is not a positive integer");
            members.push_back(static_cast<Index>(v.get<long long>() - 1));
        }
        out.groups.push_back(std::move(members));
    }
    if (weights) {
        if (!weights->is_array() || weights->size() != groups->size())
            throw IoError(path.string() + ": \"weights\" must be an array parallel to \"groups\"");
        for (const auto& v : *weights) {
            if (!v.is_number()) throw IoError(path.string() + ": non-numeric weight");
            out.weights.push_back(v.get<double>());
        }
    }
    return out;
}

GroupStructure to_group_structure(const GroupFile& file, Index p, WeightRule rule) {
    std::vector<double> w = file.weights;
    if (w.empty())
        for (const auto& g : file.groups) w.push_back(weight_for_size(rule, static_cast<Index>(g.size())));
    return GroupStructure(file.groups, std::move(w), p);
}

WeightRule parse_weight_rule(const std::string& name) {
    if (name == "one") return WeightRule::One;
    if (name == "sqrt") return WeightRule::SqrtSize;
    if (name == "invsqrt") return WeightRule::InvSqrtSize;
    throw InvalidInput("unknown weight rule '" + name + "' (one, sqrt, invsqrt)");
}

std::string to_string(WeightRule rule) {
    switch (rule) {
    case WeightRule::One: return "one";
    case WeightRule::SqrtSize: return "sqrt";
    case WeightRule::InvSqrtSize: return "invsqrt";
    }
    return "?";
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

void write_csv_matrix(const std::filesystem::path& path, const Mat& X) {
    std::ofstream out = open_out(path);
    for (Index i = 0; i < X.rows(); ++i) {
        for (Index j = 0; j < X.cols(); ++j) {
            if (j) out << ',';
            out << format_double(X(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError(path.string() + ": write error");
}

void write_csv_vector(const std::filesystem::path& path, const Vec& v) {
    write_csv_matrix(path, Mat(v));
}

} // namespace rankreg
