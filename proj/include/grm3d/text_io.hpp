#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace grm3d::text {

/// Shortest round-trip representation; stable across runs.
std::string fmt(double v);
std::string fmt_fixed(double v, int decimals);

/// Line cursor over a UTF-8 document that skips blank lines and '#' comments
/// and remembers the byte offset of the current line for error reporting.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  /// Advances to the next content line; false at end of input.
  bool next();
  std::string_view line() const { return line_; }
  std::size_t offset() const { return line_start_; }
  std::vector<std::string_view> tokens() const;

  /// Reads the next line and requires it to be "key: value", returning value.
  std::string_view expect_key(std::string_view key);
  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  std::string_view line_;
};

std::vector<std::string_view> split_ws(std::string_view s);
double parse_double(std::string_view token, const LineReader& where);
long long parse_int(std::string_view token, const LineReader& where);

}  // namespace grm3d::text
