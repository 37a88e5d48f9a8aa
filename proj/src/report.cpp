#include "lossq/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace lossq {
namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& cell, bool json) {
    struct Visitor {
        bool json;
        std::string operator()(std::monostate) const { return json ? "null" : ""; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const {
            if (json && !std::isfinite(d)) return "null";
            return format_double(d);
        }
        std::string operator()(const std::string& s) const {
            return json ? nlohmann::json(s).dump() : csv_field(s);
        }
    };
    return std::visit(Visitor{json}, cell);
}

}  // namespace

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the table header");
    rows.push_back(std::move(row));
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + csv_field(table.columns[i]);
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i], false);
        out += "\n";
    }
    return out;
}

std::string to_json_object(const std::vector<std::string>& keys, const std::vector<Cell>& values) {
    std::string out = "{";
    for (std::size_t i = 0; i < keys.size(); ++i) {
        out += (i ? ", " : "") + nlohmann::json(keys[i]).dump() + ": " + cell_text(values.at(i), true);
    }
    return out + "}";
}

std::string to_json(const Table& table) {
    std::string out = "[";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += (r ? ",\n " : "\n ") + to_json_object(table.columns, table.rows[r]);
    }
    return out + (table.rows.empty() ? "]\n" : "\n]\n");
}

}  // namespace lossq
