#pragma once

// Minimal CSV support: comma-separated, double-quote escaping, UTF-8
// passthrough. Quoted fields may contain commas, escaped quotes ("") and
// newlines.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dap/common.hpp"

namespace dap {

struct CsvRow {
  std::size_t line = 0;  // 1-based line of the row's first character
  std::vector<std::string> fields;
};

class CsvReader {
public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads one record; returns false at end of input.
  bool next(CsvRow& row) {
    row.fields.clear();
    int c = in_.get();
    if (c == EOF) return false;
    row.line = line_;
    std::string field;
    bool quoted = false;
    for (;;) {
      if (c == EOF) {
        row.fields.push_back(std::move(field));
        return true;
      }
      const char ch = static_cast<char>(c);
      if (ch == '\n') ++line_;
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          field.push_back(ch);
        }
      } else if (ch == '"' && field.empty()) {
        quoted = true;
      } else if (ch == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
      } else if (ch == '\r') {
        // swallow; handled with the following '\n' (or alone at EOL)
        if (in_.peek() == '\n') {
          in_.get();
          ++line_;
        }
        row.fields.push_back(std::move(field));
        return true;
      } else if (ch == '\n') {
        row.fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(ch);
      }
      c = in_.get();
    }
  }

private:
  std::istream& in_;
  std::size_t line_ = 1;
};

inline std::string csv_escape(std::string_view field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

inline void csv_write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::io, "cannot open file: " + path);
  return f;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(Errc::io, "cannot write file: " + path);
  return f;
}

}  // namespace dap
