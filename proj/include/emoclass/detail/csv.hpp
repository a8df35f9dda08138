#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "emoclass/error.hpp"

namespace emoclass::detail {

using CsvRecord = std::vector<std::string>;

/// RFC 4180 reader. Accepts LF or CRLF record terminators and quoted fields
/// containing separators, quotes ("" escape) and line breaks. A trailing
/// terminator after the last record is optional. Record numbering in errors
/// counts the header as record 0.
inline std::vector<CsvRecord> parse_csv(std::string_view input) {
  std::vector<CsvRecord> records;
  CsvRecord record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  std::size_t i = 0;
  const std::size_t n = input.size();

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_has_content = false;
  };

  while (i < n) {
    const char c = input[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < n && input[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw ParseError(records.size(), record.size(), "stray quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        ++i;
        break;
      case ',':
        end_field();
        record_has_content = true;
        ++i;
        break;
      case '\r':
        if (i + 1 < n && input[i + 1] == '\n') {
          end_record();
          i += 2;
        } else {
          throw ParseError(records.size(), record.size(), "bare carriage return");
        }
        break;
      case '\n':
        end_record();
        ++i;
        break;
      default:
        if (field_was_quoted) {
          throw ParseError(records.size(), record.size(), "characters after closing quote");
        }
        field.push_back(c);
        record_has_content = true;
        ++i;
        break;
    }
  }
  if (in_quotes) throw ParseError(records.size(), record.size(), "unterminated quoted field");
  if (record_has_content || !field.empty() || !record.empty()) end_record();
  return records;
}

inline bool csv_needs_quotes(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

inline void append_csv_field(std::string& out, std::string_view field) {
  if (!csv_needs_quotes(field)) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

inline void append_csv_record(std::string& out, const CsvRecord& record) {
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (i) out.push_back(',');
    append_csv_field(out, record[i]);
  }
  out.push_back('\n');
}

}  // namespace emoclass::detail
