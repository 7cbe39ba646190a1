// csvio.hpp — deterministic CSV emission: 17 significant digits, scientific
// notation, LF line endings.

#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcstool {

inline std::string csv_num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ',';
            out_ << columns[i];
        }
        out_ << '\n';
        width_ = columns.size();
    }

    void row(const std::vector<double>& values) {
        if (values.size() != width_) throw std::logic_error("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_num(values[i]);
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
    std::size_t width_ = 0;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);

} // namespace pcstool
