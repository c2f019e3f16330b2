#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "driftap/errors.hpp"
#include "driftap/mesh.hpp"
#include "driftap/model.hpp"
#include "driftap/riemann.hpp"
#include "driftap/solvers.hpp"

namespace driftap {

enum class SchemeKind { AP, Conventional, DriftLimit };

inline const char* scheme_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::AP: return "ap";
    case SchemeKind::Conventional: return "conventional";
    case SchemeKind::DriftLimit: return "drift-limit";
  }
  return "?";
}

struct StepReport {
  double dt{0.0};
  /// Largest interior |new - old| per field.
  CellValues max_update{0.0, 0.0, 0.0, 0.0};
  bool positivity_ok{true};
  bool finite_ok{true};
};

struct StepResult {
  ConservedState state;
  StepReport report;
};

/// Per-cell divergence of the eps-scaled momentum fluxes, one field per component.
struct MomentumDivergence {
  Field x;
  Field y;
  Field z;
};

inline MomentumDivergence explicit_divergences(const ConservedState& s, const Primitives& w,
                                               const FaceSpeeds& speeds, const PhysParams& p) {
  const GridSpec& g = s.grid;
  MomentumDivergence div{Field(g), Field(g), Field(g)};
  const double rdx = 1.0 / g.dx;
  const double rdy = 1.0 / g.dy;
  const double eps = p.epsilon;
  const double T = p.temperature;
  const int nx = g.nx;

  // x faces, one row at a time.
  std::vector<double> fx(static_cast<std::size_t>(nx) + 1), fy(fx.size()), fz(fx.size());
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double a = speeds.x(i, j);
      const double ml = s.mx(i, j), mr = s.mx(i + 1, j);
      const auto k = static_cast<std::size_t>(i);
      fx[k] = 0.5 * (eps * ml * w.ux(i, j) + T * s.n(i, j) + eps * mr * w.ux(i + 1, j) +
                     T * s.n(i + 1, j)) -
              0.5 * eps * a * (mr - ml);
      fy[k] = 0.5 * (eps * ml * w.uy(i, j) + eps * mr * w.uy(i + 1, j)) -
              0.5 * eps * a * (s.my(i + 1, j) - s.my(i, j));
      fz[k] = 0.5 * (eps * ml * w.uz(i, j) + eps * mr * w.uz(i + 1, j)) -
              0.5 * eps * a * (s.mz(i + 1, j) - s.mz(i, j));
    }
    for (int i = 1; i <= nx; ++i) {
      const auto k = static_cast<std::size_t>(i);
      div.x(i, j) = (fx[k] - fx[k - 1]) * rdx;
      div.y(i, j) = (fy[k] - fy[k - 1]) * rdx;
      div.z(i, j) = (fz[k] - fz[k - 1]) * rdx;
    }
  }

  // y faces; keep the south face of the current row.
  std::vector<double> sx(static_cast<std::size_t>(nx) + 1), sy(sx.size()), sz(sx.size());
  auto y_face = [&](int i, int j, double& gx, double& gy, double& gz) {
    const double a = speeds.y(i, j);
    const double ml = s.my(i, j), mr = s.my(i, j + 1);
    gx = 0.5 * (eps * ml * w.ux(i, j) + eps * mr * w.ux(i, j + 1)) -
         0.5 * eps * a * (s.mx(i, j + 1) - s.mx(i, j));
    gy = 0.5 * (eps * ml * w.uy(i, j) + T * s.n(i, j) + eps * mr * w.uy(i, j + 1) +
                T * s.n(i, j + 1)) -
         0.5 * eps * a * (mr - ml);
    gz = 0.5 * (eps * ml * w.uz(i, j) + eps * mr * w.uz(i, j + 1)) -
         0.5 * eps * a * (s.mz(i, j + 1) - s.mz(i, j));
  };
  for (int i = 1; i <= nx; ++i) {
    const auto k = static_cast<std::size_t>(i);
    y_face(i, 0, sx[k], sy[k], sz[k]);
  }
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 1; i <= nx; ++i) {
      const auto k = static_cast<std::size_t>(i);
      double gx, gy, gz;
      y_face(i, j, gx, gy, gz);
      div.x(i, j) += (gx - sx[k]) * rdy;
      div.y(i, j) += (gy - sy[k]) * rdy;
      div.z(i, j) += (gz - sz[k]) * rdy;
      sx[k] = gx;
      sy[k] = gy;
      sz[k] = gz;
    }
  }
  return div;
}

inline MomentumDivergence explicit_divergences(const ConservedState& s, const PhysParams& p,
                                               SpeedMode mode) {
  const Primitives w(s);
  return explicit_divergences(s, w, FaceSpeeds(s, w, mode, p), p);
}

/// n' = n - dt div(F), F the face mass flux built from `momenta` (mx, my of
/// that state, ghosts included), the speeds and the densities of `old`.
inline void update_density(const ConservedState& old, const ConservedState& momenta,
                           const FaceSpeeds& speeds, double dt, Field& n_new) {
  const GridSpec& g = old.grid;
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 1; i <= g.nx; ++i) n_new(i, j) = old.n(i, j);
  }
  const double cx = dt / g.dx;
  const double cy = dt / g.dy;
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      const double f = mass_flux(momenta.mx(i, j), momenta.mx(i + 1, j), speeds.x(i, j),
                                 old.n(i, j), old.n(i + 1, j));
      if (i >= 1) n_new(i, j) -= cx * f;
      if (i + 1 <= g.nx) n_new(i + 1, j) += cx * f;
    }
  }
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 1; i <= g.nx; ++i) {
      const double f = mass_flux(momenta.my(i, j), momenta.my(i, j + 1), speeds.y(i, j),
                                 old.n(i, j), old.n(i, j + 1));
      if (j >= 1) n_new(i, j) -= cy * f;
      if (j + 1 <= g.ny) n_new(i, j + 1) += cy * f;
    }
  }
}

namespace detail {

inline StepReport finish_step(const ConservedState& old, const ConservedState& next, double dt) {
  StepReport r;
  r.dt = dt;
  const GridSpec& g = old.grid;
  const std::pair<const char*, Field ConservedState::*> fields[] = {
      {"n", &ConservedState::n}, {"mx", &ConservedState::mx},
      {"my", &ConservedState::my}, {"mz", &ConservedState::mz}};
  double CellValues::*slots[] = {&CellValues::n, &CellValues::mx, &CellValues::my,
                                 &CellValues::mz};
  const auto row = static_cast<std::size_t>(g.nx + 2);
  for (std::size_t f = 0; f < 4; ++f) {
    const double* a = (old.*(fields[f].second)).values().data();
    const double* b = (next.*(fields[f].second)).values().data();
    // Four independent accumulators so the reductions pipeline.
    double worst[4] = {0.0, 0.0, 0.0, 0.0};
    double poison[4] = {0.0, 0.0, 0.0, 0.0};  // NaN once any value is inf or NaN
    for (int j = 1; j <= g.ny; ++j) {
      const std::size_t base = static_cast<std::size_t>(j) * row;
      const std::size_t end = base + static_cast<std::size_t>(g.nx) + 1;
      std::size_t k = base + 1;
      for (; k + 4 <= end; k += 4) {
        for (std::size_t q = 0; q < 4; ++q) {
          poison[q] += b[k + q] * 0.0;
          const double d = std::abs(b[k + q] - a[k + q]);
          worst[q] = d > worst[q] ? d : worst[q];
        }
      }
      for (; k < end; ++k) {
        poison[0] += b[k] * 0.0;
        const double d = std::abs(b[k] - a[k]);
        worst[0] = d > worst[0] ? d : worst[0];
      }
    }
    if (poison[0] + poison[1] + poison[2] + poison[3] != 0.0) {
      const Field& bf = next.*(fields[f].second);
      for (int j = 1; j <= g.ny; ++j) {
        for (int i = 1; i <= g.nx; ++i) {
          if (!std::isfinite(bf(i, j))) throw DivergenceError(fields[f].first, i, j, bf(i, j), false);
        }
      }
    }
    r.max_update.*slots[f] = std::max(std::max(worst[0], worst[1]), std::max(worst[2], worst[3]));
  }
  bool positive = true;
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 1; i <= g.nx; ++i) positive &= next.n(i, j) > 0.0;
  }
  if (!positive) {
    for (int j = 1; j <= g.ny; ++j) {
      for (int i = 1; i <= g.nx; ++i) {
        if (!(next.n(i, j) > 0.0)) throw DivergenceError("n", i, j, next.n(i, j), true);
      }
    }
  }
  return r;
}

inline void check_step_args(const ConservedState& s, double dt, const PhysParams& p) {
  p.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidConfigError("time step must be positive");
  for (const Field* f : {&s.n, &s.mx, &s.my, &s.mz}) {
    if (!f->matches(s.grid)) throw SizeMismatchError("field size does not match the grid");
  }
}

}  // namespace detail

/// Asymptotic-preserving step: perpendicular Lorentz solve, then the implicit
/// parallel-momentum columns, then the density update with the new momenta.
namespace detail {

// `old` must already carry ghosts filled from `bc`; `prim` and `speeds` are
// built from it.
inline StepResult ap_core(const ConservedState& old, const Primitives& prim,
                          const FaceSpeeds& speeds, const PhysParams& p, double dt,
                          const BoundarySpec& bc) {
  const GridSpec& g = old.grid;
  const MomentumDivergence div = explicit_divergences(old, prim, speeds, p);

  ConservedState next = old;
  const double inv_b = 1.0 / p.b_y;
  const double shift = p.epsilon / dt;
  const double kappa = shift * inv_b;
  const double inv_det = 1.0 / (1.0 + kappa * kappa);
  const double ex = p.e_field[0], ez = p.e_field[2];
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 1; i <= g.nx; ++i) {
      const double n = old.n(i, j);
      const double rhs1 = -inv_b * (shift * old.mz(i, j) - div.z(i, j) + n * ez);
      const double rhs2 = -inv_b * (-shift * old.mx(i, j) + div.x(i, j) - n * ex);
      next.mx(i, j) = (rhs1 + kappa * rhs2) * inv_det;
      next.mz(i, j) = (rhs2 - kappa * rhs1) * inv_det;
    }
  }

  const Field mixed = mixed_derivative(next.mx, g);
  for (int i = 1; i <= g.nx; ++i) {
    const std::vector<double> col =
        solve_tridiagonal(assemble_parallel_column(i, old, mixed, div.y, p, dt, bc));
    for (int j = 1; j <= g.ny; ++j) next.my(i, j) = col[static_cast<std::size_t>(j - 1)];
  }

  update_density(old, next, speeds, dt, next.n);
  fill_ghosts(next, bc);
  StepReport report = finish_step(old, next, dt);
  return {std::move(next), report};
}

}  // namespace detail

inline StepResult step_ap(const ConservedState& state, const PhysParams& p, double dt,
                          SpeedMode mode, const BoundarySpec& bc) {
  detail::check_step_args(state, dt, p);
  ConservedState old = state;
  fill_ghosts(old, bc);
  const Primitives prim(old);
  return detail::ap_core(old, prim, FaceSpeeds(old, prim, mode, p), p, dt, bc);
}

/// The eps = 0 specialisation of the AP step with non-resolved speeds.
inline StepResult step_drift_limit(const ConservedState& state, const PhysParams& p, double dt,
                                   const BoundarySpec& bc) {
  PhysParams limit = p;
  limit.epsilon = 0.0;
  return step_ap(state, limit, dt, SpeedMode::NonResolved, bc);
}

/// Conventional step: explicit mass flux and pressure, implicit Lorentz force.
namespace detail {

inline StepResult conventional_core(const ConservedState& old, const Primitives& prim,
                                    const FaceSpeeds& speeds, const PhysParams& p, double dt,
                                    const BoundarySpec& bc) {
  if (p.epsilon == 0.0) {
    throw DivisionByZeroError("the conventional scheme is undefined for epsilon = 0");
  }
  const GridSpec& g = old.grid;
  const MomentumDivergence div = explicit_divergences(old, prim, speeds, p);

  ConservedState next = old;
  update_density(old, old, speeds, dt, next.n);

  const double inv_b = 1.0 / p.b_y;
  const double shift = p.epsilon / dt;
  const double kappa = shift * inv_b;
  const double rate = dt / p.epsilon;
  const double inv_det = 1.0 / (1.0 + kappa * kappa);
  const double ex = p.e_field[0], ey = p.e_field[1], ez = p.e_field[2];
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 1; i <= g.nx; ++i) {
      const double n_new = next.n(i, j);
      const double rhs1 = -inv_b * (shift * old.mz(i, j) - div.z(i, j) + n_new * ez);
      const double rhs2 = -inv_b * (-shift * old.mx(i, j) + div.x(i, j) - n_new * ex);
      next.mx(i, j) = (rhs1 + kappa * rhs2) * inv_det;
      next.mz(i, j) = (rhs2 - kappa * rhs1) * inv_det;
      next.my(i, j) = old.my(i, j) - rate * div.y(i, j) + rate * n_new * ey;
    }
  }

  fill_ghosts(next, bc);
  StepReport report = finish_step(old, next, dt);
  return {std::move(next), report};
}

}  // namespace detail

inline StepResult step_conventional(const ConservedState& state, const PhysParams& p, double dt,
                                    SpeedMode mode, const BoundarySpec& bc) {
  detail::check_step_args(state, dt, p);
  if (p.epsilon == 0.0) {
    throw DivisionByZeroError("the conventional scheme is undefined for epsilon = 0");
  }
  ConservedState old = state;
  fill_ghosts(old, bc);
  const Primitives prim(old);
  return detail::conventional_core(old, prim, FaceSpeeds(old, prim, mode, p), p, dt, bc);
}

inline StepResult step(SchemeKind scheme, const ConservedState& state, const PhysParams& p,
                       double dt, SpeedMode mode, const BoundarySpec& bc) {
  switch (scheme) {
    case SchemeKind::AP: return step_ap(state, p, dt, mode, bc);
    case SchemeKind::Conventional: return step_conventional(state, p, dt, mode, bc);
    case SchemeKind::DriftLimit: return step_drift_limit(state, p, dt, bc);
  }
  throw InvalidConfigError("unknown scheme");
}

/// Same as `step`, reusing primitives and speeds the caller already built
/// (e.g. for the CFL bound). `state` must have its ghosts filled from `bc`.
inline StepResult step_prepared(SchemeKind scheme, const ConservedState& state,
                                const Primitives& prim, const FaceSpeeds& speeds,
                                const PhysParams& p, double dt, const BoundarySpec& bc) {
  detail::check_step_args(state, dt, p);
  switch (scheme) {
    case SchemeKind::AP: return detail::ap_core(state, prim, speeds, p, dt, bc);
    case SchemeKind::Conventional:
      return detail::conventional_core(state, prim, speeds, p, dt, bc);
    case SchemeKind::DriftLimit: {
      PhysParams limit = p;
      limit.epsilon = 0.0;
      return detail::ap_core(state, prim, speeds, limit, dt, bc);
    }
  }
  throw InvalidConfigError("unknown scheme");
}

}  // namespace driftap
