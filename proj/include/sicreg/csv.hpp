#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sicreg {

// Numeric table read from a comma-separated file: UTF-8, header row, '.'
// decimal separator, no quoting. Missing or non-numeric cells are rejected.
struct CsvTable {
    std::vector<std::string> columns;
    Eigen::MatrixXd values;  // rows x columns.size()

    long rows() const { return values.rows(); }
    // Index of a named column, or -1.
    int find(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin);

// Locale-independent numeric formatting with the given number of significant
// digits; NaN renders as "NA".
std::string format_num(double v, int significant = 6);

}  // namespace sicreg
