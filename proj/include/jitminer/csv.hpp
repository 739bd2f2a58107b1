#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace jitminer::csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line_no = 0; // 1-based line where the record starts
};

// RFC 4180 reader: comma separator, double-quote quoting with "" escapes,
// quoted fields may span lines, CRLF or LF endings, leading UTF-8 BOM skipped.
// Blank lines are skipped. Throws std::invalid_argument on an unterminated quote.
std::vector<Record> parse(std::string_view text);

// Quotes only when the field contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string> &fields);

} // namespace jitminer::csv
