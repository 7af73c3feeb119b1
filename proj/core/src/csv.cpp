#include "nomiclaw/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "nomiclaw/common.hpp"

namespace nomiclaw::csv {

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

int Document::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

Document read(std::istream& in) {
  Document doc;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  bool header_done = false;

  auto end_field = [&] {
    row.push_back(field);
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (!header_done) {
      doc.header = row;
      header_done = true;
    } else {
      doc.rows.push_back(row);
    }
    row.clear();
  };

  char c;
  while (in.get(c)) {
    saw_any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"': in_quotes = true; break;
      case ',': end_field(); break;
      case '\r': break;
      case '\n': end_row(); break;
      default: field += c;
    }
  }
  if (saw_any && (!field.empty() || !row.empty())) end_row();
  return doc;
}

Document read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV file: " + path.string());
  return read(in);
}

void write_file(const std::filesystem::path& path, const Document& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write CSV file: " + path.string());
  write_row(out, doc.header);
  for (const auto& row : doc.rows) write_row(out, row);
}

}  // namespace nomiclaw::csv
