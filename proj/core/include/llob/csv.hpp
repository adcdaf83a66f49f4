#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace llob {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
};

// Shortest decimal that parses back to the same double.
std::string format_number(double v);

std::string to_csv(const CsvTable& table);

// Header row, one record per line, newline-terminated. Throws IoError.
void write_csv(const CsvTable& table, const std::filesystem::path& path);

void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace llob
