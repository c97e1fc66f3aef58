#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "diodeopt/errors.hpp"

namespace diodeopt {

// Round-trip exact float formatting (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// RFC 4180 quoting; numeric cells never need it but labels might.
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"')
            out += "\"\"";
        else
            out += ch;
    }
    out += "\"";
    return out;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw ConfigError("cannot open output file: " + path);
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_escape(cells[i]);
        }
        out_ << '\n';
    }

    void write_numeric(const std::vector<double>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_double(cells[i]);
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

}  // namespace diodeopt
