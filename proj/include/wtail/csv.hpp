#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wtail::csv {

using Row = std::vector<std::string>;

// RFC 4180 field quoting: fields containing ',', '"', CR or LF are quoted and
// embedded quotes doubled. Rows end with a bare LF.
void write_row(std::ostream& out, const Row& fields);

// Parses RFC 4180 text (LF or CRLF line endings). Throws ParseError on an
// unterminated quoted field.
std::vector<Row> parse(std::string_view text);

}  // namespace wtail::csv
