#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "jsel/common.hpp"

namespace jsel {

// Locale-independent float formatting via std::to_chars.
// Result tables use 6 significant digits; data matrices use 17 so that a
// write/read round trip reproduces the exact double.
std::string format_g6(double v);
std::string format_g17(double v);

struct Table {
    std::vector<std::string> columns;
    Matrix values;  // n_rows x n_cols
};

// Strict numeric CSV: one header line, comma separated, no quoting, no
// missing cells. Parse failures report 1-based row/column coordinates.
Table read_table(std::istream& in, const std::string& source_name = "<stream>");
Table read_table_file(const std::string& path);

void write_table(std::ostream& out, const Table& table, int sig_digits = 17);
void write_table_file(const std::string& path, const Table& table, int sig_digits = 17);

// Matrix with the conventional `feature_1,...,feature_p` header.
void write_matrix(std::ostream& out, const Matrix& values);
Matrix read_matrix(std::istream& in, const std::string& source_name = "<stream>");

std::vector<std::string> feature_names(int p);

}  // namespace jsel
