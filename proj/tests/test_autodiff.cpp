#include <cmath>
#include <vector>

#include "decmdp/autodiff/grad_check.hpp"
#include "decmdp/autodiff/tape.hpp"
#include "decmdp/autodiff/var.hpp"
#include "doctest.h"

using namespace decmdp;

TEST_SUITE("autodiff") {

TEST_CASE("product and quotient rules") {
  ad::Tape tape;
  const ad::Var x = ad::Var::leaf(tape, 3.0);
  const ad::Var y = ad::Var::leaf(tape, 2.0);
  const ad::Var f = x * y + x / y;
  const ad::GradientMap g = tape.backward(f.id());
  CHECK(f.value() == doctest::Approx(7.5));
  CHECK(g[x.id()] == doctest::Approx(2.0 + 0.5));
  CHECK(g[y.id()] == doctest::Approx(3.0 - 3.0 / 4.0));
}

TEST_CASE("a reused node accumulates adjoints") {
  ad::Tape tape;
  const ad::Var x = ad::Var::leaf(tape, 1.5);
  const ad::Var f = square(x) * x + x;
  const ad::GradientMap g = tape.backward(f.id());
  CHECK(g[x.id()] == doctest::Approx(3.0 * 1.5 * 1.5 + 1.0));
}

TEST_CASE("elementary operations match central differences") {
  const ad::TapeFunction f = [](ad::Tape&, std::span<const ad::Var> v) {
    const ad::Var a = ad::exp(v[0] * 0.3) + ad::sqrt(square(v[1]) + 1.0);
    const ad::Var b = ad::reciprocal(v[2] + 4.0) - ad::abs(v[0] - v[2]);
    return ad::max(a, b) * ad::min(v[1], v[2]) + ad::relu(v[0] - 0.1) - (-v[1]);
  };
  const std::vector<double> point = {0.7, -1.3, 0.4};
  const ad::GradCheckResult r = ad::grad_check(f, point, 1e-6);
  CHECK(r.max_relative_error < 1e-7);
  CHECK(r.tape_gradient.size() == 3);
}

TEST_CASE("segmented sweep equals the full sweep") {
  ad::Tape tape;
  const ad::Var x = ad::Var::leaf(tape, 0.5);
  const ad::Var y = ad::Var::leaf(tape, -2.0);
  const ad::Var mid = x * y + ad::exp(x);
  const auto split = static_cast<ad::NodeId>(tape.size());
  const ad::Var out = square(mid) / (y * y + 1.0);
  const ad::GradientMap full = tape.backward(out.id());

  std::vector<double> adj(tape.size(), 0.0);
  adj[out.id()] = 1.0;
  tape.sweep(adj, static_cast<ad::NodeId>(tape.size()), split);
  tape.sweep(adj, split, 0);
  for (ad::NodeId id = 0; id < tape.size(); ++id) CHECK(adj[id] == full[id]);
}

TEST_CASE("checked tapes reject non-finite values") {
  ad::Tape tape;
  const ad::Var x = ad::Var::leaf(tape, -1.0);
  CHECK_THROWS_AS(ad::sqrt(x), ad::NonFiniteValue);
  const ad::Var z = ad::Var::leaf(tape, 0.0);
  CHECK_THROWS_AS(ad::reciprocal(z), ad::NonFiniteValue);
}

TEST_CASE("record validates arity and input ids") {
  ad::Tape tape;
  const ad::NodeId a = tape.leaf(1.0);
  const ad::NodeId ids[1] = {a};
  const double partials[1] = {1.0};
  CHECK_NOTHROW(tape.record(ad::OpKind::neg, ids, -1.0, partials));
  CHECK_THROWS(tape.record(ad::OpKind::leaf, ids, 2.0, partials));
  const ad::NodeId two[2] = {a, a};
  CHECK_THROWS(tape.record(ad::OpKind::neg, two, -1.0, partials));
  const ad::NodeId bad[1] = {999};
  CHECK_THROWS(tape.record(ad::OpKind::neg, bad, -1.0, partials));
}

TEST_CASE("operation names round-trip") {
  for (auto k : {ad::OpKind::add, ad::OpKind::relu, ad::OpKind::sqrt, ad::OpKind::leaf}) {
    CHECK(ad::op_from_name(ad::op_name(k)) == k);
  }
  CHECK_THROWS_AS(ad::op_from_name("not-an-op"), std::invalid_argument);
}

}  // TEST_SUITE
