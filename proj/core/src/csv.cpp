#include "llob/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include "llob/error.hpp"

namespace llob {

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    fail(ErrorCode::InvariantBreach, "row has " + std::to_string(row.size()) + " fields, header has " +
                                         std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) fail(ErrorCode::IoError, "failed writing " + path.string());
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) { write_text(to_csv(table), path); }

}  // namespace llob
