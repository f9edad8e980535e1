#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wrcm {

/// Header plus rows of unquoted, comma-separated cells. Cells never contain
/// commas or newlines: every value written is a number, a name or empty.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position; throws FormatError naming the column when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

/// Writes LF-terminated UTF-8; throws IoError on failure.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_text(path, to_csv(table));
}
inline CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

/// FNV-1a 64-bit digest as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace wrcm
