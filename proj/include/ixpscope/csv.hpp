// Minimal RFC 4180 line splitting. Records never span lines; a quoted
// field may contain commas and doubled quotes.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ixpscope::csv {

/// Splits one line into `fields`, reusing its storage. Returns false on an
/// unterminated quote or stray characters after a closing quote.
bool split_line(std::string_view line, std::vector<std::string>& fields);

/// Quotes `field` only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

}  // namespace ixpscope::csv
