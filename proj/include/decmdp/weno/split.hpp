#pragma once

// Ghost extension, Lax-Friedrichs flux splitting and stencil addressing,
// generic over double / ad::Var so the classical solver and the taped
// environment share one arithmetic path.

#include <span>
#include <stdexcept>
#include <vector>

#include "decmdp/errors.hpp"
#include "decmdp/physics/euler.hpp"
#include "decmdp/physics/state.hpp"
#include "decmdp/weno/reconstruction.hpp"

namespace decmdp::weno {

inline constexpr std::size_t kGhost = 2;
inline constexpr std::size_t kStencil = 3;
inline constexpr std::size_t kSigns = 2;
inline constexpr std::size_t kWeights = 2;

/// Split fluxes f+- = (f(u) +- alpha u) / 2 on the ghost-extended grid.
template <class T>
struct SplitFluxField {
  std::size_t fields = 0;
  std::size_t cells = 0;
  double alpha = 0.0;
  std::vector<T> plus;
  std::vector<T> minus;

  std::size_t extended() const noexcept { return cells + 2 * kGhost; }
  std::size_t interfaces() const noexcept { return cells + 1; }

  /// Stencil point k (upwind first) for field f, interface i (between cells
  /// i-1 and i), sign s (0 plus, 1 minus).
  const T& stencil(std::size_t f, std::size_t i, std::size_t s, std::size_t k) const {
    const std::size_t base = f * extended();
    return s == 0 ? plus[base + i + k] : minus[base + i + kStencil - k];
  }
};

/// Field-major copy with kGhost ghost cells per side.
template <class T>
std::vector<T> ghost_extend(const physics::ConservedState<T>& u, physics::Boundary boundary) {
  const std::size_t n = u.cells;
  const std::size_t ext = n + 2 * kGhost;
  std::vector<T> out;
  out.reserve(u.fields * ext);
  for (std::size_t f = 0; f < u.fields; ++f) {
    for (std::size_t e = 0; e < ext; ++e) {
      const auto j = static_cast<std::ptrdiff_t>(e) - static_cast<std::ptrdiff_t>(kGhost);
      std::size_t src = 0;
      if (boundary == physics::Boundary::periodic) {
        const auto nn = static_cast<std::ptrdiff_t>(n);
        src = static_cast<std::size_t>(((j % nn) + nn) % nn);
      } else {
        src = j < 0 ? 0 : (j >= static_cast<std::ptrdiff_t>(n) ? n - 1 : static_cast<std::size_t>(j));
      }
      out.push_back(u(f, src));
    }
  }
  return out;
}

/// Componentwise split of an already-evaluated flux field.
template <class T, class A>
void lf_split_into(std::span<const T> f, std::span<const T> u, const A& alpha, std::span<T> plus,
                   std::span<T> minus) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    plus[k] = 0.5 * (f[k] + alpha * u[k]);
    minus[k] = 0.5 * (f[k] - alpha * u[k]);
  }
}

/// f+- = (f +- alpha u) / 2 for plain arrays. Throws ConfigError if alpha <= 0.
struct SplitPair {
  std::vector<double> plus;
  std::vector<double> minus;
};
SplitPair lf_split(std::span<const double> f, std::span<const double> u, double alpha);

/// Physical flux on the extended grid (field-major, `ext` cells per field).
template <class T>
std::vector<T> physical_flux(const std::vector<T>& ext_u, std::size_t fields, std::size_t ext,
                             const physics::EquationSpec& spec) {
  std::vector<T> f(ext_u.size());
  if (spec.kind == physics::EquationKind::burgers1d) {
    for (std::size_t e = 0; e < ext; ++e) f[e] = physics::burgers_flux(ext_u[e]);
    return f;
  }
  if (fields != 3) throw std::invalid_argument("physical_flux: 1D Euler needs three fields");
  for (std::size_t e = 0; e < ext; ++e) {
    const auto F = physics::euler_flux(ext_u[e], ext_u[ext + e], ext_u[2 * ext + e], spec.gamma);
    f[e] = F[0];
    f[ext + e] = F[1];
    f[2 * ext + e] = F[2];
  }
  return f;
}

/// Extends, evaluates the flux and splits it with the given alpha (a double,
/// or a taped value when the splitting speed is differentiated).
template <class T, class A>
SplitFluxField<T> split_state(const physics::ConservedState<T>& u, const physics::EquationSpec& spec,
                              physics::Boundary boundary, const A& alpha) {
  const double av = math::value_of(alpha);
  if (!(av > 0.0)) throw ConfigError("flux splitting needs alpha > 0");
  SplitFluxField<T> s;
  s.fields = u.fields;
  s.cells = u.cells;
  s.alpha = av;
  const std::vector<T> ext_u = ghost_extend(u, boundary);
  const std::vector<T> f = physical_flux(ext_u, u.fields, s.extended(), spec);
  s.plus.resize(f.size());
  s.minus.resize(f.size());
  lf_split_into<T>(f, ext_u, alpha, s.plus, s.minus);
  return s;
}

/// Interface flux for one field/interface given weights per sign.
template <class T>
T interface_flux(const SplitFluxField<T>& s, std::size_t f, std::size_t i, const Pair<T>& w_plus,
                 const Pair<T>& w_minus) {
  const T plus = reconstruct(s.stencil(f, i, 0, 0), s.stencil(f, i, 0, 1), s.stencil(f, i, 0, 2), w_plus);
  const T minus =
      reconstruct(s.stencil(f, i, 1, 0), s.stencil(f, i, 1, 1), s.stencil(f, i, 1, 2), w_minus);
  return plus + minus;
}

/// Classical WENO interface fluxes (Q x (N+1), field-major), generic path.
template <class T>
std::vector<T> weno_interface_fluxes_generic(const SplitFluxField<T>& s, const WenoCoefficients& c) {
  std::vector<T> out;
  out.reserve(s.fields * s.interfaces());
  for (std::size_t f = 0; f < s.fields; ++f) {
    for (std::size_t i = 0; i < s.interfaces(); ++i) {
      const Pair<T> wp = weno_weights(s.stencil(f, i, 0, 0), s.stencil(f, i, 0, 1), s.stencil(f, i, 0, 2), c);
      const Pair<T> wm = weno_weights(s.stencil(f, i, 1, 0), s.stencil(f, i, 1, 1), s.stencil(f, i, 1, 2), c);
      out.push_back(interface_flux(s, f, i, wp, wm));
    }
  }
  return out;
}

/// u_j - (dt/dx) (F_{j+1/2} - F_{j-1/2}) for every field and cell.
template <class T>
physics::ConservedState<T> conservative_update(const physics::ConservedState<T>& u,
                                               std::span<const T> fluxes, double dt) {
  const double ratio = dt / u.dx;
  const std::size_t ni = u.cells + 1;
  physics::ConservedState<T> next = u;
  for (std::size_t f = 0; f < u.fields; ++f) {
    for (std::size_t j = 0; j < u.cells; ++j) {
      next(f, j) = u(f, j) - ratio * (fluxes[f * ni + j + 1] - fluxes[f * ni + j]);
    }
  }
  return next;
}

}  // namespace decmdp::weno
