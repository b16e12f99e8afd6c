#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankreg/problem.hpp"

namespace rankreg {

/// Unreadable file or malformed content; the message carries path and line.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rectangular numeric CSV, comma separated, '.' decimal. A first row that does
/// not parse as numbers is taken as a header and skipped. Blank lines are ignored.
Mat read_csv_matrix(const std::filesystem::path& path);

/// One value per row (single column CSV, optional header).
Vec read_csv_vector(const std::filesystem::path& path);

/// Parsed content of a group file, indices converted to 0-based.
struct GroupFile {
    std::vector<std::vector<Index>> groups;
    std::vector<double> weights;  ///< empty when the file has none
};

/// {"groups": [[1, 2], [3]], "weights": [1.41, 1]} with 1-based column indices.
/// A bare top-level array of arrays is accepted too.
GroupFile read_group_file(const std::filesystem::path& path);

/// Builds the structure for p columns, filling missing weights with `rule`.
GroupStructure to_group_structure(const GroupFile& file, Index p, WeightRule rule);

WeightRule parse_weight_rule(const std::string& name);
std::string to_string(WeightRule rule);

void write_csv_matrix(const std::filesystem::path& path, const Mat& X);
void write_csv_vector(const std::filesystem::path& path, const Vec& v);

/// Shortest representation that parses back to the same double.
std::string format_double(double x);

} // namespace rankreg
