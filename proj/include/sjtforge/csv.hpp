#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sjtforge::csv {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rows keyed by header name. Quoted fields with embedded commas supported;
/// no multi-line fields.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  size_t column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw CsvError("missing column: " + name);
  }
  const std::string& at(size_t row, const std::string& name) const {
    return rows.at(row).at(column(name));
  }
};

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

inline Table parse(std::istream& in) {
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header.size())
        throw CsvError("row width mismatch: " + line);
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

inline Table parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

inline Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  return parse(in);
}

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string write(const Table& t) {
  std::ostringstream out;
  for (size_t i = 0; i < t.header.size(); ++i)
    out << (i ? "," : "") << quote(t.header[i]);
  out << "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << quote(row[i]);
    out << "\n";
  }
  return out.str();
}

}  // namespace sjtforge::csv
