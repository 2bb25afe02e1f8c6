#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rankshift::csv {

/// Splits one delimited record. Fields may be wrapped in double quotes, with
/// "" standing for a literal quote inside a quoted field. A trailing '\r' is
/// ignored. Throws InputError on an unterminated quote.
std::vector<std::string> split(std::string_view line, char delimiter = ',');

/// Quotes a field only when it contains the delimiter, a quote or a newline.
std::string escape(std::string_view field, char delimiter = ',');

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

/// Writes one record terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

/// Reads the next non-blank line; returns false at end of stream.
bool next_line(std::istream& in, std::string& line);

}  // namespace rankshift::csv
