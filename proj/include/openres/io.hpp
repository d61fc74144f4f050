#pragma once

#include <string>
#include <vector>

#include "openres/types.hpp"

namespace openres {

// 17 significant digits: doubles survive a write/read round trip exactly.
std::string format_double(double value);

struct CsvWriter {
  explicit CsvWriter(std::vector<std::string> columns) : header(std::move(columns)) {}

  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  void write(const std::string& path) const;
};

std::string csv_cell(double value);
std::string csv_cell(long value);
std::string csv_cell(int value);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void ensure_directory(const std::string& path);

}  // namespace openres
