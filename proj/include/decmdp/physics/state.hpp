#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace decmdp::physics {

enum class EquationKind { euler1d, burgers1d, euler2d };

std::string_view equation_name(EquationKind kind);
EquationKind equation_from_name(std::string_view name);

struct EquationSpec {
  EquationKind kind = EquationKind::euler1d;
  double gamma = 1.4;

  std::size_t fields() const noexcept {
    switch (kind) {
      case EquationKind::euler1d: return 3;
      case EquationKind::burgers1d: return 1;
      case EquationKind::euler2d: return 4;
    }
    return 0;
  }
  bool is_euler() const noexcept { return kind != EquationKind::burgers1d; }

  /// Throws ConfigError when gamma <= 1 for Euler kinds.
  void validate() const;

  static EquationSpec euler(double gamma = 1.4) { return {EquationKind::euler1d, gamma}; }
  static EquationSpec burgers() { return {EquationKind::burgers1d, 1.4}; }
};

std::vector<std::string> field_names(const EquationSpec& spec);

enum class Boundary { outflow, periodic };

std::string_view boundary_name(Boundary b);
Boundary boundary_from_name(std::string_view name);

/// Conserved variables over a uniform 1D grid, stored field-major: q[f * cells + j].
/// T is `double` for plain rollouts and `ad::Var` for taped ones.
template <class T>
struct ConservedState {
  std::size_t fields = 0;
  std::size_t cells = 0;
  double dx = 0.0;
  double x0 = 0.0;
  std::vector<T> q;

  ConservedState() = default;
  ConservedState(std::size_t nfields, std::size_t ncells, double cell_width, double left_edge)
      : fields(nfields), cells(ncells), dx(cell_width), x0(left_edge), q(nfields * ncells) {}

  T& operator()(std::size_t f, std::size_t j) { return q[f * cells + j]; }
  const T& operator()(std::size_t f, std::size_t j) const { return q[f * cells + j]; }

  std::span<T> field(std::size_t f) { return std::span<T>(q).subspan(f * cells, cells); }
  std::span<const T> field(std::size_t f) const {
    return std::span<const T>(q).subspan(f * cells, cells);
  }

  double x_center(std::size_t j) const noexcept { return x0 + (static_cast<double>(j) + 0.5) * dx; }

  template <class U>
  ConservedState<U> same_grid() const {
    return ConservedState<U>(fields, cells, dx, x0);
  }
};

using State1D = ConservedState<double>;

/// Uniform 1D grid: `cells` cells covering [x_min, x_max].
struct Grid1D {
  std::size_t cells = 0;
  double x_min = 0.0;
  double x_max = 1.0;

  double dx() const noexcept { return (x_max - x_min) / static_cast<double>(cells); }
  double x_center(std::size_t j) const noexcept {
    return x_min + (static_cast<double>(j) + 0.5) * dx();
  }
  void validate() const;
};

/// Order r = 2 needs one full 2r-1 point stencil.
inline constexpr std::size_t kMinCells = 5;

}  // namespace decmdp::physics
