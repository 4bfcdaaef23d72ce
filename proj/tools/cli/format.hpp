#pragma once

#include <json.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace cvtrans::cli {

// Full-precision float formatting for CSV output ('.' decimal, 17
// significant digits, round-trip exact).
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_csv() const {
        std::string out;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += columns[c];
        }
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                out += fmt17(row[c]);
            }
            out += '\n';
        }
        return out;
    }

    std::string to_json() const {
        nlohmann::ordered_json j;
        j["columns"] = columns;
        auto arr = nlohmann::ordered_json::array();
        for (const auto& row : rows) arr.push_back(row);
        j["rows"] = arr;
        return j.dump(2) + "\n";
    }
};

}  // namespace cvtrans::cli
