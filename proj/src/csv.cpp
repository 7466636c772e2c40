#include "jsel/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace jsel {

namespace {

std::string format_g(double v, int digits) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.emplace_back(trim(std::string_view(line).substr(start)));
            break;
        }
        out.emplace_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string format_g6(double v) { return format_g(v, 6); }
std::string format_g17(double v) { return format_g(v, 17); }

std::vector<std::string> feature_names(int p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (int j = 1; j <= p; ++j) names.push_back("feature_" + std::to_string(j));
    return names;
}

Table read_table(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line))
        throw data_error(source_name + ": empty input, expected a header line");
    Table table;
    table.columns = split_line(line);
    const std::size_t ncol = table.columns.size();
    if (ncol == 0 || (ncol == 1 && table.columns[0].empty()))
        throw data_error(source_name + ": empty header");

    std::vector<double> cells;
    std::size_t nrow = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto fields = split_line(line);
        ++nrow;
        if (fields.size() != ncol)
            throw data_error(source_name + ": row " + std::to_string(nrow) + " has " +
                             std::to_string(fields.size()) + " cells, expected " +
                             std::to_string(ncol));
        for (std::size_t c = 0; c < ncol; ++c) {
            const std::string& f = fields[c];
            double v = 0.0;
            auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc{} || res.ptr != f.data() + f.size())
                throw data_error(source_name + ": non-numeric or missing cell at row " +
                                 std::to_string(nrow) + ", column " + std::to_string(c + 1) +
                                 " (" + table.columns[c] + "): '" + f + "'");
            cells.push_back(v);
        }
    }

    table.values.resize(static_cast<Eigen::Index>(nrow), static_cast<Eigen::Index>(ncol));
    for (std::size_t r = 0; r < nrow; ++r)
        for (std::size_t c = 0; c < ncol; ++c)
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                cells[r * ncol + c];
    return table;
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "' for reading");
    return read_table(in, path);
}

void write_table(std::ostream& out, const Table& table, int sig_digits) {
    if (static_cast<Eigen::Index>(table.columns.size()) != table.values.cols())
        throw param_error("write_table: header width does not match the value matrix");
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
            if (c) out << ',';
            out << format_g(table.values(r, c), sig_digits);
        }
        out << '\n';
    }
}

void write_table_file(const std::string& path, const Table& table, int sig_digits) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    write_table(out, table, sig_digits);
}

void write_matrix(std::ostream& out, const Matrix& values) {
    Table t;
    t.columns = feature_names(static_cast<int>(values.cols()));
    t.values = values;
    write_table(out, t, 17);
}

Matrix read_matrix(std::istream& in, const std::string& source_name) {
    return read_table(in, source_name).values;
}

}  // namespace jsel
