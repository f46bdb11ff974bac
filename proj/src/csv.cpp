#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "resint/scenario.hpp"

namespace resint {

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

void write_csv(const ResultTable& table, std::ostream& out) {
  validate(table);
  for (const auto& [name, value] : table.metadata) out << "# " << name << ": " << value << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (row[c]) out << format_number(*row[c]);
    }
    out << '\n';
  }
}

void emit_csv(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file)
    throw std::runtime_error("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
  write_csv(table, file);
  file.flush();
  if (!file)
    throw std::runtime_error("write to '" + path.string() + "' failed: " + std::strerror(errno));
}

}  // namespace resint
