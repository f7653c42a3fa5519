#pragma once

// Minimal RFC 4180 style tables: header row, comma separator, fields quoted
// when they contain a comma, quote or line break.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mec::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const Table&, const Table&) = default;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string escape(std::string_view field);
std::string to_string(const Table& table);
// Rows must all have the header's width.
Table parse(std::string_view text);

void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace mec::csv
