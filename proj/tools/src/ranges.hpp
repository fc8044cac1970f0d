#pragma once

#include <string_view>
#include <vector>

namespace subkb::cli {

/// Comma-separated integers, each either `n` or an inclusive `lo..hi`.
std::vector<int> parse_int_list(std::string_view text);

/// Comma-separated reals, each either `x` or an inclusive `start:step:stop`.
/// Grid points are rounded to 12 significant digits.
std::vector<double> parse_real_list(std::string_view text);

}  // namespace subkb::cli
