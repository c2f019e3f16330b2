#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "driftap/errors.hpp"
#include "driftap/mesh.hpp"
#include "driftap/model.hpp"
#include "driftap/riemann.hpp"
#include "driftap/solvers.hpp"
#include "driftap/stepper.hpp"

namespace driftap {

struct PropertyResult {
  std::string name;
  bool ok{false};
  std::string detail;
};

using Stepper = std::function<StepResult(SchemeKind, const ConservedState&, const PhysParams&,
                                         double, SpeedMode, const BoundarySpec&)>;

inline StepResult default_stepper(SchemeKind k, const ConservedState& s, const PhysParams& p,
                                  double dt, SpeedMode m, const BoundarySpec& bc) {
  return step(k, s, p, dt, m, bc);
}

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline double max_interior_diff(const ConservedState& a, const ConservedState& b) {
  double d = 0.0;
  for (int j = 1; j <= a.grid.ny; ++j) {
    for (int i = 1; i <= a.grid.nx; ++i) {
      d = std::max({d, std::abs(a.n(i, j) - b.n(i, j)), std::abs(a.mx(i, j) - b.mx(i, j)),
                    std::abs(a.my(i, j) - b.my(i, j)), std::abs(a.mz(i, j) - b.mz(i, j))});
    }
  }
  return d;
}

inline BoundarySpec uniform_boundary(const CellValues& v) {
  BoundarySpec bc;
  for (Side s : kFillOrder) bc[s] = v;
  return bc;
}

}  // namespace detail

/// Interior mass budget of one step: sum (n' - n) dA against dt times the mass
/// leaving through the boundary faces. Face fluxes are rebuilt here from single
/// Riemann problems rather than taken from the stepper.
struct MassBalance {
  double change{0.0};
  double outflow{0.0};
  double scale{0.0};

  double residual() const { return std::abs(change + outflow); }
  double relative() const { return scale > 0.0 ? residual() / scale : residual(); }
};

inline MassBalance mass_balance(const ConservedState& before, const ConservedState& after,
                                SchemeKind scheme, SpeedMode mode, const PhysParams& p,
                                const BoundarySpec& bc, double dt) {
  ConservedState old = before;
  fill_ghosts(old, bc);
  ConservedState next = after;
  fill_ghosts(next, bc);
  // AP-type schemes transport mass with the new momenta, the conventional one with the old.
  const ConservedState& m = scheme == SchemeKind::Conventional ? old : next;
  const PhysParams q = [&] {
    PhysParams r = p;
    if (scheme == SchemeKind::DriftLimit) r.epsilon = 0.0;
    return r;
  }();
  const SpeedMode speed_mode = scheme == SchemeKind::DriftLimit ? SpeedMode::NonResolved : mode;
  const GridSpec& g = old.grid;

  auto cell = [&](int i, int j) {
    return CellState::from_conserved(old.at(i, j));
  };
  auto x_flux = [&](int i, int j) {  // face between (i, j) and (i+1, j)
    const double a = interface_speed(cell(i, j), cell(i + 1, j), Axis::X, speed_mode, q);
    return mass_flux(m.mx(i, j), m.mx(i + 1, j), a, old.n(i, j), old.n(i + 1, j));
  };
  auto y_flux = [&](int i, int j) {
    const double a = interface_speed(cell(i, j), cell(i, j + 1), Axis::Y, speed_mode, q);
    return mass_flux(m.my(i, j), m.my(i, j + 1), a, old.n(i, j), old.n(i, j + 1));
  };

  MassBalance b;
  const double area = g.cell_area();
  double mass = 0.0;
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 1; i <= g.nx; ++i) {
      b.change += (next.n(i, j) - old.n(i, j)) * area;
      mass += std::abs(old.n(i, j)) * area;
    }
  }
  double gross = 0.0;
  for (int j = 1; j <= g.ny; ++j) {
    const double west = -x_flux(0, j) * g.dy;
    const double east = x_flux(g.nx, j) * g.dy;
    b.outflow += dt * (west + east);
    gross += dt * (std::abs(west) + std::abs(east));
  }
  for (int i = 1; i <= g.nx; ++i) {
    const double south = -y_flux(i, 0) * g.dx;
    const double north = y_flux(i, g.ny) * g.dx;
    b.outflow += dt * (south + north);
    gross += dt * (std::abs(south) + std::abs(north));
  }
  b.scale = std::max(mass, gross);
  return b;
}

/// Drift state with matching Dirichlet data is left unchanged by the AP step.
inline PropertyResult check_fixed_point(int nx = 50, int ny = 50, int steps = 100,
                                        double tol = 1e-12) {
  PropertyResult r{"fixed point", true, ""};
  const GridSpec g = build_grid(nx, ny);
  const CellValues drift = drift_limit_state();
  const BoundarySpec bc = detail::uniform_boundary(drift);
  double worst = 0.0;
  for (double eps : {1.0, 1e-6, 0.0}) {
    for (SpeedMode mode : {SpeedMode::NonResolved, SpeedMode::Resolved}) {
      if (eps == 0.0 && mode == SpeedMode::Resolved) continue;
      const PhysParams p = PhysParams::test_case(eps);
      ConservedState s(g);
      s.fill(drift);
      const ConservedState start = s;
      for (int k = 0; k < steps; ++k) {
        const double dt = compute_dt(s, mode, p, 0.5, 1e-2);
        s = (eps == 0.0 ? step_drift_limit(s, p, dt, bc) : step_ap(s, p, dt, mode, bc)).state;
        worst = std::max(worst, detail::max_interior_diff(s, start));
      }
    }
  }
  r.ok = worst <= tol;
  r.detail = "max drift " + detail::sci(worst) + " (tol " + detail::sci(tol) + ")";
  return r;
}

/// Every accepted step balances interior mass change against boundary fluxes.
inline PropertyResult check_conservation(const Stepper& stepper = default_stepper, int nx = 16,
                                         int ny = 12, int steps = 5, double tol = 1e-12) {
  PropertyResult r{"conservation", true, ""};
  const GridSpec g = build_grid(nx, ny);
  struct Case {
    SchemeKind scheme;
    SpeedMode mode;
    double eps;
    CaseKind data;
  };
  const Case cases[] = {
      {SchemeKind::AP, SpeedMode::NonResolved, 1e-6, CaseKind::Prepared},
      {SchemeKind::AP, SpeedMode::Resolved, 1e-6, CaseKind::Prepared},
      {SchemeKind::AP, SpeedMode::NonResolved, 1e-6, CaseKind::Unprepared},
      {SchemeKind::AP, SpeedMode::Resolved, 1.0, CaseKind::Prepared},
      {SchemeKind::DriftLimit, SpeedMode::NonResolved, 0.0, CaseKind::Prepared},
      {SchemeKind::Conventional, SpeedMode::Resolved, 1e-2, CaseKind::Prepared},
      {SchemeKind::Conventional, SpeedMode::NonResolved, 1e-2, CaseKind::Unprepared},
      {SchemeKind::Conventional, SpeedMode::Resolved, 1.0, CaseKind::Unprepared},
  };
  double worst = 0.0;
  std::string where;
  for (const Case& c : cases) {
    const PhysParams p = PhysParams::test_case(c.eps);
    const CaseSpec spec =
        c.data == CaseKind::Prepared ? CaseSpec::prepared(c.eps) : CaseSpec::unprepared(c.eps, 1e-2);
    auto [s, bc] = init_case(spec, g);
    const SpeedMode mode = c.scheme == SchemeKind::DriftLimit ? SpeedMode::NonResolved : c.mode;
    for (int k = 0; k < steps; ++k) {
      const double dt = compute_dt(s, mode, p, 0.5, 1e-2);
      StepResult next;
      try {
        next = stepper(c.scheme, s, p, dt, mode, bc);
      } catch (const DivergenceError&) {
        break;  // rejected step
      }
      const MassBalance b = mass_balance(s, next.state, c.scheme, mode, p, bc, dt);
      if (b.relative() > worst) {
        worst = b.relative();
        where = std::string(scheme_name(c.scheme)) + "/" + mode_name(mode) + " step " +
                std::to_string(k + 1);
      }
      s = std::move(next.state);
    }
  }
  r.ok = worst <= tol;
  r.detail = "max relative imbalance " + detail::sci(worst) +
             (where.empty() ? "" : " at " + where) + " (tol " + detail::sci(tol) + ")";
  return r;
}

/// Residual of the 2x2 Lorentz solve, in ulps of the largest term of each row.
inline double perp_residual_ulps(const PerpSystem& s, double mx, double mz) {
  using L = long double;
  auto ulps = [](L res, double scale) {
    const double u = std::nextafter(scale, std::numeric_limits<double>::infinity()) - scale;
    return u > 0.0 ? static_cast<double>(std::abs(res)) / u : 0.0;
  };
  const L r1 = L(s.rhs1) - (L(mx) - L(s.kappa) * L(mz));
  const L r2 = L(s.rhs2) - (L(s.kappa) * L(mx) + L(mz));
  const double sc1 = std::max({std::abs(s.rhs1), std::abs(mx), std::abs(s.kappa * mz)});
  const double sc2 = std::max({std::abs(s.rhs2), std::abs(mz), std::abs(s.kappa * mx)});
  return std::max(ulps(r1, sc1), ulps(r2, sc2));
}

/// Thomas and 2x2 solves reproduce their right-hand sides.
inline PropertyResult check_solver_residuals(unsigned seed = 12345, int systems = 200) {
  PropertyResult r{"solver residuals", true, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> size(1, 50);
  double worst_tri = 0.0;
  for (int k = 0; k < systems; ++k) {
    const auto n = static_cast<std::size_t>(size(rng));
    TridiagonalSystem sys(n);
    for (std::size_t i = 0; i < n; ++i) {
      sys.lower[i] = i > 0 ? unit(rng) : 0.0;
      sys.upper[i] = i + 1 < n ? unit(rng) : 0.0;
      sys.diag[i] = (std::abs(sys.lower[i]) + std::abs(sys.upper[i]) + 0.5 + std::abs(unit(rng))) *
                    (unit(rng) < 0 ? -1.0 : 1.0);
      sys.rhs[i] = unit(rng);
    }
    const auto x = solve_tridiagonal(sys);
    const auto ax = sys.apply(x);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num = std::max(num, std::abs(ax[i] - sys.rhs[i]));
      den = std::max(den, std::abs(sys.rhs[i]));
    }
    worst_tri = std::max(worst_tri, den > 0.0 ? num / den : num);
  }
  double worst_perp = 0.0;
  for (int k = 0; k < systems; ++k) {
    const double kappa = k == 0 ? 0.0 : std::pow(10.0, 12.0 * (k - 1) / (systems - 2.0));
    const PerpSystem s{kappa, unit(rng), unit(rng)};
    const auto [mx, mz] = solve_perp_2x2(s);
    worst_perp = std::max(worst_perp, perp_residual_ulps(s, mx, mz));
  }
  r.ok = worst_tri <= 1e-12 && worst_perp <= 4.0;
  r.detail = "tridiagonal relative residual " + detail::sci(worst_tri) + ", 2x2 residual " +
             detail::sci(worst_perp) + " ulp";
  return r;
}

/// One AP step with a vanishing epsilon matches one drift-limit step.
inline PropertyResult check_ap_limit(int nx = 100, int ny = 100, double eps = 1e-14,
                                     double tol = 1e-8) {
  PropertyResult r{"AP limit consistency", true, ""};
  const GridSpec g = build_grid(nx, ny);
  auto [s, bc] = init_case(CaseSpec::prepared(eps), g);
  const PhysParams p = PhysParams::test_case(eps);
  const double dt = compute_dt(s, SpeedMode::NonResolved, p, 0.5, 1e-2);
  const ConservedState a = step_ap(s, p, dt, SpeedMode::NonResolved, bc).state;
  const ConservedState b = step_drift_limit(s, p, dt, bc).state;
  const double d = detail::max_interior_diff(a, b);
  r.ok = d <= tol;
  r.detail = "max difference " + detail::sci(d) + " (tol " + detail::sci(tol) + ")";
  return r;
}

/// The fast suite behind the `check` command.
inline std::vector<PropertyResult> run_property_suite() {
  std::vector<PropertyResult> out;
  auto guarded = [&out](const char* name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("fixed point", [] { return check_fixed_point(); });
  guarded("conservation", [] { return check_conservation(); });
  guarded("solver residuals", [] { return check_solver_residuals(); });
  guarded("AP limit consistency", [] { return check_ap_limit(); });
  return out;
}

}  // namespace driftap
