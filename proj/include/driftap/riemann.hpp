#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "driftap/errors.hpp"
#include "driftap/mesh.hpp"
#include "driftap/model.hpp"

namespace driftap {

enum class Axis { X = 0, Y = 1 };

/// Resolved speeds carry the sound speed sqrt(T/eps); non-resolved speeds drop it.
enum class SpeedMode { Resolved, NonResolved };

inline const char* mode_name(SpeedMode m) {
  return m == SpeedMode::Resolved ? "resolved" : "nonresolved";
}

/// Primitive cell data entering a Riemann problem.
struct CellState {
  double n{1.0};
  Vec3 u{0.0, 0.0, 0.0};

  static CellState from_conserved(const CellValues& c) {
    return {c.n, {c.mx / c.n, c.my / c.n, c.mz / c.n}};
  }

  Vec3 momentum() const { return {n * u[0], n * u[1], n * u[2]}; }
};

/// Roe-averaged interface state.
struct InterfaceState {
  double n_hat{1.0};
  Vec3 u_hat{0.0, 0.0, 0.0};

  Vec3 momentum() const { return {n_hat * u_hat[0], n_hat * u_hat[1], n_hat * u_hat[2]}; }
};

struct TimeControls {
  double cfl{0.5};
  double dt{0.0};
  double t{0.0};

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidConfigError("cfl must lie in (0, 1]");
  }
};

namespace detail {

inline double roe_weighted(double ul, double ur, double sqrt_nl, double sqrt_nr) {
  return (sqrt_nl * ul + sqrt_nr * ur) / (sqrt_nl + sqrt_nr);
}

inline double face_speed(double ul, double ur, double u_hat, double c) {
  const double lo = std::min(ul - c, u_hat - c);
  const double hi = std::max(u_hat + c, ur + c);
  return std::max(std::abs(lo), std::abs(hi));
}

}  // namespace detail

inline InterfaceState roe_average(const CellState& left, const CellState& right) {
  if (!(left.n > 0.0) || !(right.n > 0.0)) {
    throw NonPositiveDensityError("Roe average needs positive densities");
  }
  const double sl = std::sqrt(left.n);
  const double sr = std::sqrt(right.n);
  InterfaceState out;
  out.n_hat = sl * sr;
  for (int k = 0; k < 3; ++k) out.u_hat[k] = detail::roe_weighted(left.u[k], right.u[k], sl, sr);
  return out;
}

/// Numerical viscosity speed at a face normal to `axis`:
/// a = max(|min(u_L - c, u_hat - c)|, |max(u_hat + c, u_R + c)|), with c = 0
/// in non-resolved mode.
inline double interface_speed(const CellState& left, const CellState& right, Axis axis,
                              SpeedMode mode, const PhysParams& p) {
  const double c = mode == SpeedMode::Resolved ? sound_speed(p) : 0.0;
  const int k = static_cast<int>(axis);
  const double u_hat = roe_average(left, right).u_hat[k];
  return detail::face_speed(left.u[k], right.u[k], u_hat, c);
}

/// Momentum flux through a face normal to `axis`, pre-multiplied by epsilon:
/// avg(eps n u_a u + T n e_a) - (eps a / 2) jump(n u). Components are (x, y, z).
inline Vec3 momentum_flux(const CellState& left, const CellState& right, Axis axis, double a,
                          const PhysParams& p) {
  const int k = static_cast<int>(axis);
  const double eps = p.epsilon;
  const Vec3 ml = left.momentum();
  const Vec3 mr = right.momentum();
  Vec3 g{};
  for (int c = 0; c < 3; ++c) {
    double fl = eps * ml[k] * left.u[c];
    double fr = eps * mr[k] * right.u[c];
    if (c == k) {
      fl += p.temperature * left.n;
      fr += p.temperature * right.n;
    }
    g[c] = 0.5 * (fl + fr) - 0.5 * eps * a * (mr[c] - ml[c]);
  }
  return g;
}

inline Vec3 momentum_flux_x(const CellState& l, const CellState& r, double a, const PhysParams& p) {
  return momentum_flux(l, r, Axis::X, a, p);
}

inline Vec3 momentum_flux_y(const CellState& l, const CellState& r, double a, const PhysParams& p) {
  return momentum_flux(l, r, Axis::Y, a, p);
}

/// Mass flux from centred (new) momenta and an (old) density jump.
inline double mass_flux(double m_left, double m_right, double a, double n_left, double n_right) {
  return 0.5 * (m_left + m_right) - 0.5 * a * (n_right - n_left);
}

/// Velocities and sqrt(n) of every cell, ghosts included. Built once per step
/// so face loops need no divisions or square roots.
struct Primitives {
  Field ux;
  Field uy;
  Field uz;
  Field sqrt_n;

  explicit Primitives(const ConservedState& s)
      : ux(s.grid), uy(s.grid), uz(s.grid), sqrt_n(s.grid) {
    const auto& n = s.n.values();
    const auto& mx = s.mx.values();
    const auto& my = s.my.values();
    const auto& mz = s.mz.values();
    for (double v : n) {
      if (!(v > 0.0)) throw NonPositiveDensityError("non-positive density in face loop");
    }
    double* px = ux.values().data();
    double* py = uy.values().data();
    double* pz = uz.values().data();
    double* ps = sqrt_n.values().data();
    for (std::size_t k = 0; k < n.size(); ++k) {
      const double inv = 1.0 / n[k];
      px[k] = mx[k] * inv;
      py[k] = my[k] * inv;
      pz[k] = mz[k] * inv;
      ps[k] = std::sqrt(n[k]);
    }
  }

  CellState cell(const ConservedState& s, int i, int j) const {
    return {s.n(i, j), {ux(i, j), uy(i, j), uz(i, j)}};
  }
};

/// Viscosity speeds on every face, ghost faces included.
/// x(i, j) is the face between cells (i, j) and (i+1, j), i = 0..nx, j = 1..ny;
/// y(i, j) is the face between cells (i, j) and (i, j+1), i = 1..nx, j = 0..ny.
class FaceSpeeds {
 public:
  FaceSpeeds(const ConservedState& s, const Primitives& w, SpeedMode mode, const PhysParams& p)
      : nx_(s.grid.nx), ny_(s.grid.ny) {
    const double c = mode == SpeedMode::Resolved ? sound_speed(p) : 0.0;
    x_.resize(static_cast<std::size_t>(nx_ + 1) * ny_);
    y_.resize(static_cast<std::size_t>(nx_) * (ny_ + 1));
    for (int j = 1; j <= ny_; ++j) {
      for (int i = 0; i <= nx_; ++i) {
        const double ul = w.ux(i, j);
        const double ur = w.ux(i + 1, j);
        const double u_hat = detail::roe_weighted(ul, ur, w.sqrt_n(i, j), w.sqrt_n(i + 1, j));
        const double a = detail::face_speed(ul, ur, u_hat, c);
        x_[xi(i, j)] = a;
        max_x_ = std::max(max_x_, a);
      }
    }
    for (int j = 0; j <= ny_; ++j) {
      for (int i = 1; i <= nx_; ++i) {
        const double ul = w.uy(i, j);
        const double ur = w.uy(i, j + 1);
        const double u_hat = detail::roe_weighted(ul, ur, w.sqrt_n(i, j), w.sqrt_n(i, j + 1));
        const double a = detail::face_speed(ul, ur, u_hat, c);
        y_[yi(i, j)] = a;
        max_y_ = std::max(max_y_, a);
      }
    }
  }

  FaceSpeeds(const ConservedState& s, SpeedMode mode, const PhysParams& p)
      : FaceSpeeds(s, Primitives(s), mode, p) {}

  double x(int i, int j) const { return x_[xi(i, j)]; }
  double y(int i, int j) const { return y_[yi(i, j)]; }
  double max_x() const { return max_x_; }
  double max_y() const { return max_y_; }

 private:
  std::size_t xi(int i, int j) const {
    return static_cast<std::size_t>(j - 1) * (nx_ + 1) + static_cast<std::size_t>(i);
  }
  std::size_t yi(int i, int j) const {
    return static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i - 1);
  }

  int nx_;
  int ny_;
  std::vector<double> x_;
  std::vector<double> y_;
  double max_x_{0.0};
  double max_y_{0.0};
};

/// dt = cfl / (max a_x / dx + max a_y / dy). When every speed vanishes the
/// fallback `dt_max` is returned; without one a ZeroSpeedError is raised.
inline double compute_dt(const FaceSpeeds& speeds, const GridSpec& g, double cfl,
                         std::optional<double> dt_max = std::nullopt) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidConfigError("cfl must lie in (0, 1]");
  const double rate = speeds.max_x() / g.dx + speeds.max_y() / g.dy;
  if (std::isnan(rate)) throw Error("non-finite interface speeds");
  if (!(rate > 0.0)) {
    if (dt_max) return *dt_max;
    throw ZeroSpeedError("all interface speeds vanish; no CFL time step");
  }
  return cfl / rate;
}

inline double compute_dt(const ConservedState& s, SpeedMode mode, const PhysParams& p, double cfl,
                         std::optional<double> dt_max = std::nullopt) {
  return compute_dt(FaceSpeeds(s, mode, p), s.grid, cfl, dt_max);
}

}  // namespace driftap
