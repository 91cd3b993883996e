#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace invertor {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Strict parse of a whole field; throws ConfigError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

// Splits one CSV line on commas (no quoting; none of our formats need it).
std::vector<std::string_view> split_csv(std::string_view line);

}  // namespace invertor
