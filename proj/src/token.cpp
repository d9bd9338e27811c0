// SPDX-License-Identifier: Apache-2.0
#include "ndf/token.hpp"

#include <charconv>
#include <cmath>

namespace ndf {

std::string to_string(ArcKind k) {
  switch (k) {
    case ArcKind::Data: return "data";
    case ArcKind::Control: return "control";
    case ArcKind::Switch: return "switch";
  }
  return "?";
}

bool operator==(const Token& a, const Token& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ArcKind::Data: return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
    case ArcKind::Control: return a.flag == b.flag;
    case ArcKind::Switch: return a.pattern_id == b.pattern_id;
  }
  return false;
}

std::string format_double(double v);

std::string to_string(const Token& t) {
  switch (t.kind) {
    case ArcKind::Data: return "data(" + format_double(t.value) + ")";
    case ArcKind::Control: return t.flag ? "control(true)" : "control(false)";
    case ArcKind::Switch: return "switch(" + std::to_string(t.pattern_id) + ")";
  }
  return "?";
}

// Shortest round-trip-safe decimal form.
std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ConnectionPattern ConnectionPattern::identity(int n) {
  ConnectionPattern p(n, n);
  for (int i = 0; i < n; ++i) p.set(i, i);
  return p;
}

int ConnectionPattern::column_target(int in) const {
  for (int o = 0; o < rows_; ++o)
    if (at(o, in)) return o;
  return -1;
}

int ConnectionPattern::column_count(int in) const {
  int n = 0;
  for (int o = 0; o < rows_; ++o) n += at(o, in) ? 1 : 0;
  return n;
}

}  // namespace ndf
