#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nomiclaw::csv {

/// RFC-4180 field quoting: fields containing comma, quote, CR or LF are
/// quoted, embedded quotes doubled.
std::string escape(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

struct Document {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;  // -1 when absent
};

Document read(std::istream& in);
Document read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Document& doc);

}  // namespace nomiclaw::csv
