#pragma once

#include <cassert>
#include <cmath>

#include "decmdp/autodiff/tape.hpp"

namespace decmdp::ad {

/// A scalar recorded on a Tape. Cheap to copy; copies refer to the same node.
/// Every arithmetic result is computed with the same double operations the
/// plain `double` code path uses, so values agree bit for bit.
class Var {
 public:
  Var() = default;
  Var(Tape& tape, NodeId id) : tape_(&tape), id_(id), value_(tape.value(id)) {}

  static Var leaf(Tape& tape, double v) { return Var(tape, tape.leaf(v)); }
  static Var constant(Tape& tape, double v) { return Var(tape, tape.constant(v)); }

  double value() const noexcept { return value_; }
  NodeId id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }

  friend Var operator+(const Var& a, const Var& b) {
    return a.make2(OpKind::add, b, a.value_ + b.value_, 1.0, 1.0);
  }
  friend Var operator-(const Var& a, const Var& b) {
    return a.make2(OpKind::sub, b, a.value_ - b.value_, 1.0, -1.0);
  }
  friend Var operator*(const Var& a, const Var& b) {
    return a.make2(OpKind::mul, b, a.value_ * b.value_, b.value_, a.value_);
  }
  friend Var operator/(const Var& a, const Var& b) {
    const double q = a.value_ / b.value_;
    return a.make2(OpKind::div, b, q, 1.0 / b.value_, -q / b.value_);
  }
  friend Var operator-(const Var& a) { return a.make1(OpKind::neg, -a.value_, -1.0); }

  // Mixed forms fold the constant into the partial and record one input.
  friend Var operator+(const Var& a, double c) { return a.make1(OpKind::add, a.value_ + c, 1.0); }
  friend Var operator+(double c, const Var& a) { return a.make1(OpKind::add, c + a.value_, 1.0); }
  friend Var operator-(const Var& a, double c) { return a.make1(OpKind::sub, a.value_ - c, 1.0); }
  friend Var operator-(double c, const Var& a) { return a.make1(OpKind::sub, c - a.value_, -1.0); }
  friend Var operator*(const Var& a, double c) { return a.make1(OpKind::mul, a.value_ * c, c); }
  friend Var operator*(double c, const Var& a) { return a.make1(OpKind::mul, c * a.value_, c); }
  friend Var operator/(const Var& a, double c) { return a.make1(OpKind::div, a.value_ / c, 1.0 / c); }
  friend Var operator/(double c, const Var& a) {
    const double q = c / a.value_;
    return a.make1(OpKind::div, q, -q / a.value_);
  }

  friend bool operator<(const Var& a, const Var& b) { return a.value_ < b.value_; }
  friend bool operator>(const Var& a, const Var& b) { return a.value_ > b.value_; }
  friend bool operator<=(const Var& a, const Var& b) { return a.value_ <= b.value_; }
  friend bool operator>=(const Var& a, const Var& b) { return a.value_ >= b.value_; }

  friend Var abs(const Var& a) {
    const double v = a.value_;
    return a.make1(OpKind::abs, std::fabs(v), v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
  }
  // Ties route the full adjoint to the first argument.
  friend Var max(const Var& a, const Var& b) {
    const bool first = a.value_ >= b.value_;
    return a.make2(OpKind::max, b, first ? a.value_ : b.value_, first ? 1.0 : 0.0, first ? 0.0 : 1.0);
  }
  friend Var max(const Var& a, double c) {
    const bool first = a.value_ >= c;
    return a.make1(OpKind::max, first ? a.value_ : c, first ? 1.0 : 0.0);
  }
  friend Var min(const Var& a, const Var& b) {
    const bool first = a.value_ <= b.value_;
    return a.make2(OpKind::min, b, first ? a.value_ : b.value_, first ? 1.0 : 0.0, first ? 0.0 : 1.0);
  }
  friend Var square(const Var& a) { return a.make1(OpKind::square, a.value_ * a.value_, 2.0 * a.value_); }
  friend Var sqrt(const Var& a) {
    const double s = std::sqrt(a.value_);
    return a.make1(OpKind::sqrt, s, 0.5 / s);
  }
  friend Var exp(const Var& a) {
    const double e = std::exp(a.value_);
    return a.make1(OpKind::exp, e, e);
  }
  friend Var reciprocal(const Var& a) {
    const double r = 1.0 / a.value_;
    return a.make1(OpKind::reciprocal, r, -r * r);
  }
  friend Var relu(const Var& a) {
    const bool on = a.value_ > 0.0;
    return a.make1(OpKind::relu, on ? a.value_ : 0.0, on ? 1.0 : 0.0);
  }

 private:
  Var make1(OpKind kind, double v, double da) const {
    assert(tape_ != nullptr);
    return Var(tape_, tape_->push1(kind, id_, v, da), v);
  }
  Var make2(OpKind kind, const Var& b, double v, double da, double db) const {
    assert(tape_ != nullptr && tape_ == b.tape_);
    return Var(tape_, tape_->push2(kind, id_, b.id_, v, da, db), v);
  }
  Var(Tape* tape, NodeId id, double v) : tape_(tape), id_(id), value_(v) {}

  Tape* tape_ = nullptr;
  NodeId id_ = 0;
  double value_ = 0.0;
};

Var abs(const Var& a);
Var max(const Var& a, const Var& b);
Var max(const Var& a, double c);
Var min(const Var& a, const Var& b);
Var square(const Var& a);
Var sqrt(const Var& a);
Var exp(const Var& a);
Var reciprocal(const Var& a);
Var relu(const Var& a);

}  // namespace decmdp::ad

// Generic math used by code templated on `double` / `ad::Var`.
namespace decmdp::math {

inline double value_of(double x) noexcept { return x; }
inline double value_of(const ad::Var& x) noexcept { return x.value(); }

inline double abs(double x) noexcept { return std::fabs(x); }
inline double max(double a, double b) noexcept { return a >= b ? a : b; }
inline double min(double a, double b) noexcept { return a <= b ? a : b; }
inline double square(double x) noexcept { return x * x; }
inline double sqrt(double x) noexcept { return std::sqrt(x); }
inline double exp(double x) noexcept { return std::exp(x); }
inline double reciprocal(double x) noexcept { return 1.0 / x; }
inline double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

using ad::abs;
using ad::exp;
using ad::max;
using ad::min;
using ad::reciprocal;
using ad::relu;
using ad::sqrt;
using ad::square;

}  // namespace decmdp::math
