#include "decmdp/autodiff/tape.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "decmdp/autodiff/grad_check.hpp"

namespace decmdp::ad {

namespace {

constexpr std::array<std::string_view, 15> kOpNames = {
    "add", "sub",    "mul",  "div", "neg",        "abs",  "max",      "min",
    "square", "sqrt", "exp", "reciprocal", "relu", "constant", "leaf",
};

struct Arity {
  std::uint8_t min;
  std::uint8_t max;
};

Arity arity_of(OpKind kind) {
  switch (kind) {
    case OpKind::add:
    case OpKind::sub:
    case OpKind::mul:
    case OpKind::div:
    case OpKind::max:
    case OpKind::min:
      return {1, 2};
    case OpKind::neg:
    case OpKind::abs:
    case OpKind::square:
    case OpKind::sqrt:
    case OpKind::exp:
    case OpKind::reciprocal:
    case OpKind::relu:
      return {1, 1};
    case OpKind::constant:
    case OpKind::leaf:
      return {0, 0};
  }
  throw std::invalid_argument("unknown op kind");
}

}  // namespace

std::string_view op_name(OpKind kind) {
  const auto i = static_cast<std::size_t>(kind);
  if (i >= kOpNames.size()) throw std::invalid_argument("unknown op kind");
  return kOpNames[i];
}

OpKind op_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == name) return static_cast<OpKind>(i);
  }
  throw std::invalid_argument("unknown op kind: " + std::string(name));
}

NonFiniteValue::NonFiniteValue(OpKind kind, double value)
    : std::domain_error("non-finite value " + std::to_string(value) + " recorded by op '" +
                        std::string(op_name(kind)) + "'"),
      kind_(kind) {}

void Tape::check_value(OpKind kind, double value) const {
  if (mode_ == Mode::checked && !std::isfinite(value)) throw NonFiniteValue(kind, value);
}

NodeId Tape::record(OpKind kind, std::span<const NodeId> inputs, double value,
                    std::span<const double> partials) {
  const Arity a = arity_of(kind);
  if (inputs.size() < a.min || inputs.size() > a.max) {
    throw std::invalid_argument("op '" + std::string(op_name(kind)) + "' got " +
                                std::to_string(inputs.size()) + " inputs");
  }
  if (partials.size() != inputs.size()) {
    throw std::invalid_argument("record: need exactly one partial per input");
  }
  for (NodeId in : inputs) {
    if (in >= nodes_.size()) throw std::out_of_range("record: input id not on tape");
  }
  check_value(kind, value);
  for (double p : partials) check_value(kind, p);

  Node n;
  n.kind = kind;
  n.value = value;
  n.arity = static_cast<std::uint8_t>(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    n.input[i] = inputs[i];
    n.partial[i] = partials[i];
  }
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::push1(OpKind kind, NodeId a, double value, double da) {
  check_value(kind, value);
  Node n;
  n.kind = kind;
  n.value = value;
  n.arity = 1;
  n.input[0] = a;
  n.partial[0] = da;
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::push2(OpKind kind, NodeId a, NodeId b, double value, double da, double db) {
  check_value(kind, value);
  Node n;
  n.kind = kind;
  n.value = value;
  n.arity = 2;
  n.input[0] = a;
  n.input[1] = b;
  n.partial[0] = da;
  n.partial[1] = db;
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::sweep(std::span<double> adjoints, NodeId hi, NodeId lo) const {
  if (adjoints.size() < nodes_.size()) throw std::invalid_argument("sweep: adjoint buffer too small");
  if (hi > nodes_.size()) hi = static_cast<NodeId>(nodes_.size());
  for (NodeId id = hi; id > lo;) {
    --id;
    const double g = adjoints[id];
    if (g == 0.0) continue;
    const Node& n = nodes_[id];
    // Zero partials still propagate NaN adjoints; skip them explicitly.
    if (n.arity > 0 && n.partial[0] != 0.0) adjoints[n.input[0]] += g * n.partial[0];
    if (n.arity > 1 && n.partial[1] != 0.0) adjoints[n.input[1]] += g * n.partial[1];
  }
}

GradientMap Tape::backward(NodeId seed) const {
  if (seed >= nodes_.size()) throw std::out_of_range("backward: seed not on tape");
  GradientMap grads(nodes_.size());
  grads.at(seed) = 1.0;
  sweep(grads.values(), seed + 1, 0);
  return grads;
}

double evaluate(const TapeFunction& f, std::span<const double> point) {
  Tape tape(Tape::Mode::unchecked);
  std::vector<Var> leaves;
  leaves.reserve(point.size());
  for (double x : point) leaves.push_back(Var::leaf(tape, x));
  return f(tape, leaves).value();
}

GradCheckResult grad_check(const TapeFunction& f, std::span<const double> point, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_check: h must be positive");
  GradCheckResult result;

  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(point.size());
  for (double x : point) leaves.push_back(Var::leaf(tape, x));
  const Var out = f(tape, leaves);
  const GradientMap grads = tape.backward(out.id());

  std::vector<double> shifted(point.begin(), point.end());
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double g = grads[leaves[i].id()];
    shifted[i] = point[i] + h;
    const double fp = evaluate(f, shifted);
    shifted[i] = point[i] - h;
    const double fm = evaluate(f, shifted);
    shifted[i] = point[i];
    const double fd = (fp - fm) / (2.0 * h);
    result.tape_gradient.push_back(g);
    result.fd_gradient.push_back(fd);
    const double rel = std::fabs(g - fd) / (std::fabs(fd) + kGradCheckDivEps);
    if (rel > result.max_relative_error) result.max_relative_error = rel;
  }
  return result;
}

}  // namespace decmdp::ad
