#pragma once

// CSV tables and atomic file output.

#include <filesystem>
#include <string>
#include <vector>

namespace wsob {

/// Shortest round-trip form: printf "%.17g".
std::string format_number(double v);

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  /// RFC 4180 quoting, "\n" line endings.
  std::string render() const;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace wsob
