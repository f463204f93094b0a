#pragma once

// Reverse-mode scalar tape. Every node stores its value and the local partial
// derivatives with respect to at most two earlier nodes, so the reverse sweep
// is a single pass in decreasing id order.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace decmdp::ad {

using NodeId = std::uint32_t;

enum class OpKind : std::uint8_t {
  add,
  sub,
  mul,
  div,
  neg,
  abs,
  max,
  min,
  square,
  sqrt,
  exp,
  reciprocal,
  relu,
  constant,
  leaf,
};

std::string_view op_name(OpKind kind);

/// Inverse of op_name; throws std::invalid_argument for unknown names.
OpKind op_from_name(std::string_view name);

class NonFiniteValue : public std::domain_error {
 public:
  NonFiniteValue(OpKind kind, double value);
  OpKind kind() const noexcept { return kind_; }

 private:
  OpKind kind_;
};

struct Node {
  double value = 0.0;
  double partial[2] = {0.0, 0.0};
  NodeId input[2] = {0, 0};
  OpKind kind = OpKind::leaf;
  std::uint8_t arity = 0;
};

/// Adjoints indexed by node id.
class GradientMap {
 public:
  GradientMap() = default;
  explicit GradientMap(std::size_t size) : adjoint_(size, 0.0) {}

  double operator[](NodeId id) const { return id < adjoint_.size() ? adjoint_[id] : 0.0; }
  double& at(NodeId id) { return adjoint_.at(id); }
  std::size_t size() const noexcept { return adjoint_.size(); }
  std::span<double> values() noexcept { return adjoint_; }
  std::span<const double> values() const noexcept { return adjoint_; }

 private:
  std::vector<double> adjoint_;
};

class Tape {
 public:
  enum class Mode { checked, unchecked };

  explicit Tape(Mode mode = Mode::checked) : mode_(mode) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  /// Appends a node. Validates op arity, input ids, one partial per input and
  /// (in checked mode) finiteness of the value and partials.
  NodeId record(OpKind kind, std::span<const NodeId> inputs, double value,
                std::span<const double> partials);

  NodeId leaf(double value) { return record(OpKind::leaf, {}, value, {}); }
  NodeId constant(double value) { return record(OpKind::constant, {}, value, {}); }

  double value(NodeId id) const { return nodes_.at(id).value; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }
  Mode mode() const noexcept { return mode_; }
  void set_mode(Mode mode) noexcept { mode_ = mode; }
  void reserve(std::size_t n) { nodes_.reserve(n); }
  void clear() noexcept { nodes_.clear(); }

  /// Full reverse sweep from `seed`; adjoint(seed) = 1.
  GradientMap backward(NodeId seed) const;

  /// Partial reverse sweep over ids in [lo, hi), highest first. Lets callers
  /// inject adjoints for externally differentiated blocks between segments.
  void sweep(std::span<double> adjoints, NodeId hi, NodeId lo) const;

 private:
  // Unvalidated append used by the operator overloads in var.hpp.
  friend class Var;
  NodeId push1(OpKind kind, NodeId a, double value, double da);
  NodeId push2(OpKind kind, NodeId a, NodeId b, double value, double da, double db);
  void check_value(OpKind kind, double value) const;

  Mode mode_;
  std::vector<Node> nodes_;
};

}  // namespace decmdp::ad
