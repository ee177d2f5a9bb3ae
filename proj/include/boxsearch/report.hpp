#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace boxsearch {

// One tabular result plus the fully resolved configuration that produced
// it.  Both serializations keep cell types: integers stay integers,
// doubles always carry a '.' or exponent and 17 significant digits, so a
// re-parse reproduces the report exactly.
using Cell = std::variant<int64_t, double, std::string>;

struct Report {
  nlohmann::json config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

bool operator==(const Report& a, const Report& b);

// 17 significant digits, '.' decimal point, never locale-dependent; plain
// integer renderings get a trailing ".0" so the type survives a re-parse.
std::string format_double(double v);

// First line "# config <json>", then a header row, then data rows.
std::string to_csv(const Report& report);
Report parse_csv(const std::string& text);

std::string to_json(const Report& report);
Report parse_json(const std::string& text);

}  // namespace boxsearch
