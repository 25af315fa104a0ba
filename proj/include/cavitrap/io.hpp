#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace cavitrap::io {

/// Writes to a sibling temp file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);

/// Quotes fields containing commas, quotes or newlines.
std::string csv_field(std::string_view s);

/// Accumulates rows of a CSV document.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(const std::vector<std::string>& cells);
  std::size_t columns() const { return n_cols_; }
  const std::string& str() const { return text_; }

 private:
  std::size_t n_cols_;
  std::string text_;
};

/// Hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view data);

std::string read_text(const std::filesystem::path& path);

}  // namespace cavitrap::io
