#pragma once

#include <istream>
#include <string>
#include <vector>

#include "cssrs/error.hpp"

namespace cssrs::detail {

// Reads one RFC-4180 record (quoted fields may span lines). Returns false at
// EOF. `lines_consumed` reports how many physical lines the record covered.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields,
                            std::size_t line_no, std::size_t& lines_consumed) {
  fields.clear();
  lines_consumed = 0;
  int c = in.get();
  if (c == EOF) return false;
  std::string field;
  bool quoted = false;
  ++lines_consumed;
  while (true) {
    if (c == EOF) {
      if (quoted)
        throw data_error("line " + std::to_string(line_no) + ": unterminated quoted field");
      fields.push_back(field);
      return true;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++lines_consumed;
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(field);
      return true;
    } else {
      field.push_back(ch);
    }
    c = in.get();
  }
}

inline std::string csv_escape(const std::string& s) {
  bool needs = s.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace cssrs::detail
