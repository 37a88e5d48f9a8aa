#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace lossq {

// Empty cell (monostate) prints as an empty CSV field and as JSON null.
using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

// 17 significant digits; nan/inf print as nan, inf, -inf.
std::string format_double(double x);

std::string to_csv(const Table& table);
// Array of objects keyed by column.
std::string to_json(const Table& table);
// One row as a single JSON object.
std::string to_json_object(const std::vector<std::string>& keys, const std::vector<Cell>& values);

}  // namespace lossq
