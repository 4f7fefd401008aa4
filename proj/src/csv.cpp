#include "sicreg/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sicreg/errors.hpp"

namespace sicreg {

int CsvTable::find(const std::string& name) const {
    for (size_t j = 0; j < columns.size(); ++j)
        if (columns[j] == name) return static_cast<int>(j);
    return -1;
}

namespace {

std::string strip(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_comma(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(strip(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(strip(cur));
    return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InputError(origin + ": empty file");

    CsvTable t;
    t.columns = split_comma(line);
    for (size_t j = 0; j < t.columns.size(); ++j) {
        if (t.columns[j].empty())
            throw InputError(origin + ": empty header in column " + std::to_string(j + 1));
        for (size_t k = 0; k < j; ++k)
            if (t.columns[k] == t.columns[j])
                throw InputError(origin + ": duplicate column '" + t.columns[j] + "'");
    }

    std::vector<std::vector<double>> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        const auto cells = split_comma(line);
        if (cells.size() != t.columns.size())
            throw InputError(origin + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.columns.size()) + " fields, got " +
                             std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (size_t j = 0; j < cells.size(); ++j) {
            if (cells[j].empty())
                throw InputError(origin + ":" + std::to_string(lineno) + ": missing value in '" +
                                 t.columns[j] + "'");
            try {
                size_t pos = 0;
                row[j] = std::stod(cells[j], &pos);
                if (pos != cells[j].size()) throw std::invalid_argument(cells[j]);
            } catch (const std::exception&) {
                throw InputError(origin + ":" + std::to_string(lineno) + ": bad number '" +
                                 cells[j] + "' in '" + t.columns[j] + "'");
            }
            if (!std::isfinite(row[j]))
                throw InputError(origin + ":" + std::to_string(lineno) + ": non-finite value in '" +
                                 t.columns[j] + "'");
        }
        rows.push_back(std::move(row));
    }

    t.values.resize(static_cast<long>(rows.size()), static_cast<long>(t.columns.size()));
    for (long i = 0; i < t.values.rows(); ++i)
        for (long j = 0; j < t.values.cols(); ++j)
            t.values(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path);
}

std::string format_num(double v, int significant) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, v);
    return buf;
}

}  // namespace sicreg
