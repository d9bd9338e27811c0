// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ndf {

/// Arc/port categories. Every arc carries exactly one token kind.
enum class ArcKind : uint8_t { Data, Control, Switch };

std::string to_string(ArcKind k);

/// The unit of event-driven execution. A token is a scalar data value,
/// a boolean control flag, or a switch selector carrying the index of a
/// connection pattern stored in the receiving dynamic where primitive.
struct Token {
  ArcKind kind = ArcKind::Data;
  double value = 0.0;   // Data
  bool flag = false;    // Control
  int pattern_id = 0;   // Switch

  static Token data(double v) { return {ArcKind::Data, v, false, 0}; }
  static Token control(bool f) { return {ArcKind::Control, 0.0, f, 0}; }
  static Token pattern(int id) { return {ArcKind::Switch, 0.0, false, id}; }

  friend bool operator==(const Token& a, const Token& b);
};

std::string to_string(const Token& t);

/// Boolean adjacency matrix routing where-primitive inputs to outputs.
/// Entry (out, in) == true means tokens on input `in` are forwarded to
/// output `out`. Each input column has at most one set entry; an all-zero
/// column means the input is never consumed by this pattern.
class ConnectionPattern {
 public:
  ConnectionPattern() = default;
  ConnectionPattern(int rows, int cols) : rows_(rows), cols_(cols), bits_(static_cast<size_t>(rows) * cols, 0) {}

  static ConnectionPattern identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool at(int out, int in) const { return bits_[static_cast<size_t>(out) * cols_ + in] != 0; }
  void set(int out, int in, bool v = true) { bits_[static_cast<size_t>(out) * cols_ + in] = v ? 1 : 0; }

  /// Destination row of column `in`, or -1 when the column is all zero.
  int column_target(int in) const;
  /// Number of set entries in column `in`.
  int column_count(int in) const;

  friend bool operator==(const ConnectionPattern& a, const ConnectionPattern& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.bits_ == b.bits_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<uint8_t> bits_;
};

}  // namespace ndf
