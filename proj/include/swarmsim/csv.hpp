#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace swarmsim {

// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

// RFC-4180: quote when the cell holds a comma, quote, or newline.
std::string csv_escape(const std::string& cell);

// Minimal RFC-4180 reader (quotes, escaped quotes, CRLF); one row per record.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace swarmsim
