#include "ranges.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "subkb/errors.hpp"

namespace subkb::cli {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

[[noreturn]] void bad(std::string_view text, const char* what) {
  throw ContractError("cli", "cannot parse '" + std::string(text) + "' as " + what);
}

int to_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) bad(whole, "an integer list");
  return v;
}

double to_real(std::string_view s, std::string_view whole) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    bad(whole, "a real list");
  }
  return v;
}

double round12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (auto item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(to_int(item, text));
      continue;
    }
    const int lo = to_int(item.substr(0, dots), text);
    const int hi = to_int(item.substr(dots + 2), text);
    if (hi < lo) bad(text, "an increasing range");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(to_real(item, text));
      continue;
    }
    if (parts.size() != 3) bad(text, "start:step:stop");
    const double start = to_real(parts[0], text);
    const double step = to_real(parts[1], text);
    const double stop = to_real(parts[2], text);
    if (step <= 0.0 || stop < start) bad(text, "an increasing start:step:stop grid");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (n > 1'000'000) bad(text, "a grid of at most 10^6 points");
    for (long i = 0; i < n; ++i) out.push_back(round12(start + static_cast<double>(i) * step));
  }
  return out;
}

}  // namespace subkb::cli
