#include "grm3d/text_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "grm3d/errors.hpp"

namespace grm3d::text {

std::string fmt(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  if (std::fabs(v) < 0.5 * std::pow(10.0, -decimals)) v = 0.0;
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool LineReader::next() {
  while (pos_ < text_.size()) {
    const std::size_t start = pos_;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    pos_ = end + 1;
    std::string_view l = text_.substr(start, end - start);
    if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    if (split_ws(l).empty()) continue;
    line_start_ = start;
    line_ = l;
    return true;
  }
  line_start_ = text_.size();
  line_ = {};
  return false;
}

std::vector<std::string_view> LineReader::tokens() const { return split_ws(line_); }

std::string_view LineReader::expect_key(std::string_view key) {
  if (!next()) fail("unexpected end of document, expected \"" + std::string(key) + ":\"");
  const auto colon = line_.find(':');
  if (colon == std::string_view::npos) fail("expected \"" + std::string(key) + ":\"");
  auto name = split_ws(line_.substr(0, colon));
  if (name.size() != 1 || name[0] != key) {
    fail("expected key \"" + std::string(key) + "\", found \"" + std::string(line_.substr(0, colon)) + "\"");
  }
  auto value = line_.substr(colon + 1);
  while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.remove_prefix(1);
  while (!value.empty() && (value.back() == ' ' || value.back() == '\t' || value.back() == '\r')) value.remove_suffix(1);
  return value;
}

void LineReader::fail(const std::string& message) const { throw FormatError(message, line_start_); }

double parse_double(std::string_view token, const LineReader& where) {
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
    where.fail("invalid number \"" + std::string(token) + "\"");
  }
  return v;
}

long long parse_int(std::string_view token, const LineReader& where) {
  long long v = 0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    where.fail("invalid integer \"" + std::string(token) + "\"");
  }
  return v;
}

}  // namespace grm3d::text
