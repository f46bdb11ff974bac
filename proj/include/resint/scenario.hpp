#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resint/config.hpp"

namespace resint {

inline constexpr std::string_view kToolVersion = "resint 0.1.0";

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;  // empty cell: rate pole
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Every row matches the column count and every present value is finite.
void validate(const ResultTable& table);

/// Executes a scenario. Sweep points run on up to `threads` workers; rows are
/// assembled in input order.
ResultTable run_scenario(const ScenarioConfig& cfg, unsigned threads = 1);

/// 17 significant digits, trailing zeros dropped.
std::string format_number(double value);

void write_csv(const ResultTable& table, std::ostream& out);

/// Throws std::runtime_error naming the path and OS error on I/O failure.
void emit_csv(const ResultTable& table, const std::filesystem::path& path);

}  // namespace resint
