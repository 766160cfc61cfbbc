#pragma once

// Minimal RFC 4180 reader/writer: comma separated, double-quote escaping, '#' comment lines
// before the header are skipped.

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "harmbench/error.hpp"

namespace harmbench::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index, or -1.
  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline std::vector<std::vector<std::string>> parse_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, line_has_content = false;
  auto end_field = [&] {
    rec.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    if (line_has_content) {
      end_field();
      records.push_back(std::move(rec));
    }
    rec.clear();
    field.clear();
    line_has_content = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        line_has_content = true;
        break;
      case ',':
        line_has_content = true;
        end_field();
        break;
      case '\r': break;
      case '\n': end_record(); break;
      default:
        field.push_back(c);
        line_has_content = true;
    }
  }
  if (quoted) throw Error(Errc::UnreadableFile, "unterminated quoted CSV field");
  end_record();
  return records;
}

inline Table parse(const std::string& text) {
  // Drop leading comment lines.
  std::size_t start = 0;
  while (start < text.size() && text[start] == '#') {
    const auto nl = text.find('\n', start);
    start = nl == std::string::npos ? text.size() : nl + 1;
  }
  auto records = parse_records(text.substr(start));
  Table t;
  if (records.empty()) throw Error(Errc::UnreadableFile, "CSV has no header row");
  t.header = std::move(records.front());
  for (auto& h : t.header) {
    while (!h.empty() && (h.back() == ' ' || h.back() == '\t')) h.pop_back();
    while (!h.empty() && (h.front() == ' ' || h.front() == '\t')) h.erase(h.begin());
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() > t.header.size())
      throw Error(Errc::UnreadableFile, "CSV row " + std::to_string(r) + " has more fields than the header");
    rec.resize(t.header.size());
    t.rows.push_back(std::move(rec));
  }
  return t;
}

inline std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << escape(fields[i]);
  }
  os << '\n';
}

}  // namespace harmbench::csv
