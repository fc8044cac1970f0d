#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace subkb::cli {

/// Quotes a field when it holds a comma, quote or line break; quotes are
/// doubled inside.
std::string csv_field(std::string_view text);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double x);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& cells);

  template <typename... T>
  void line(const T&... cells) {
    row({cell(cells)...});
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(std::string_view s) { return std::string(s); }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double x) { return format_real(x); }
  template <typename Int, typename = std::enable_if_t<std::is_integral_v<Int>>>
  static std::string cell(Int x) {
    return std::to_string(x);
  }

  std::ostream& out_;
};

}  // namespace subkb::cli
