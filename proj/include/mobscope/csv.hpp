#pragma once

#include <istream>
#include <string>
#include <vector>

namespace mobscope {

// Reads one CSV record (RFC 4180 quoting: fields may be quoted, quoted
// fields may contain commas/newlines/doubled quotes). Returns false at end
// of input. line_no tracks physical lines for error reporting.
bool read_csv_row(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no);

// Quotes a field only when it needs it.
std::string csv_quote(const std::string& s);

}  // namespace mobscope
