#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "skewpivot/error.hpp"

namespace skewpivot {

// "name(arg, arg)" or bare "name"
struct Descriptor {
  std::string name;
  std::vector<std::string> args;
};

inline std::string trim(std::string_view s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  auto b = std::find_if(s.begin(), s.end(), not_space);
  auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string(b, e) : std::string();
}

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline Descriptor parse_descriptor(std::string_view text) {
  const std::string s = lowercase(trim(text));
  Descriptor d;
  const auto open = s.find('(');
  if (open == std::string::npos) {
    d.name = s;
  } else {
    if (s.back() != ')') fail(ErrorKind::config_error, "unbalanced descriptor '" + s + "'");
    d.name = trim(std::string_view(s).substr(0, open));
    std::string_view inner = std::string_view(s).substr(open + 1, s.size() - open - 2);
    while (!inner.empty()) {
      const auto comma = inner.find(',');
      d.args.push_back(trim(inner.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      inner.remove_prefix(comma + 1);
    }
  }
  if (d.name.empty()) fail(ErrorKind::config_error, "empty descriptor");
  return d;
}

inline double parse_real(std::string_view text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) fail(ErrorKind::config_error, "not a number: '" + s + "'");
  return v;
}

inline long long parse_integer(std::string_view text) {
  const std::string s = trim(text);
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) fail(ErrorKind::config_error, "not an integer: '" + s + "'");
  return v;
}

// Shortest text that parses back to the same double.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace skewpivot
