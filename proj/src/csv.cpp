#include "jitminer/csv.hpp"

#include <stdexcept>

namespace jitminer::csv {

std::vector<Record> parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) {
    text.remove_prefix(3);
  }
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line_no = 1;
  current.line_no = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    bool blank = current.fields.empty() && !field_started && field.empty();
    if (!blank) {
      end_field();
      records.push_back(std::move(current));
    }
    current = Record{};
    current.line_no = line_no;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') {
          ++line_no;
        }
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
    case '"':
      in_quotes = true;
      field_started = true;
      break;
    case ',':
      end_field();
      field_started = true;
      break;
    case '\r':
      if (i + 1 < text.size() && text[i + 1] == '\n') {
        break;
      }
      ++line_no;
      end_record();
      break;
    case '\n':
      ++line_no;
      end_record();
      break;
    default:
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) {
    throw std::invalid_argument("unterminated quoted field starting on line " +
                                std::to_string(current.line_no));
  }
  end_record();
  return records;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string join(const std::vector<std::string> &fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += escape(fields[i]);
  }
  return out;
}

} // namespace jitminer::csv
