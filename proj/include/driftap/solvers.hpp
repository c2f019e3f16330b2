#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "driftap/errors.hpp"
#include "driftap/mesh.hpp"
#include "driftap/model.hpp"

namespace driftap {

/// Implicit Lorentz coupling of one cell:
///   [ 1     -kappa ] [mx]   [rhs1]
///   [ kappa  1     ] [mz] = [rhs2],   kappa = eps / (B dt).
struct PerpSystem {
  double kappa{0.0};
  double rhs1{0.0};
  double rhs2{0.0};
};

inline std::pair<double, double> solve_perp_2x2(const PerpSystem& s) {
  const double inv_det = 1.0 / (1.0 + s.kappa * s.kappa);
  return {(s.rhs1 + s.kappa * s.rhs2) * inv_det, (s.rhs2 - s.kappa * s.rhs1) * inv_det};
}

/// One tridiagonal block: row k reads lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k].
/// lower[0] and upper[size-1] are ignored.
template <std::floating_point T>
struct BasicTridiagonal {
  std::vector<T> lower;
  std::vector<T> diag;
  std::vector<T> upper;
  std::vector<T> rhs;

  BasicTridiagonal() = default;
  explicit BasicTridiagonal(std::size_t n) : lower(n), diag(n), upper(n), rhs(n) {}

  std::size_t size() const { return diag.size(); }

  /// A x, for residual checks.
  std::vector<T> apply(const std::vector<T>& x) const {
    const std::size_t n = size();
    std::vector<T> y(n);
    for (std::size_t k = 0; k < n; ++k) {
      T v = diag[k] * x[k];
      if (k > 0) v += lower[k] * x[k - 1];
      if (k + 1 < n) v += upper[k] * x[k + 1];
      y[k] = v;
    }
    return y;
  }
};

using TridiagonalSystem = BasicTridiagonal<double>;

inline constexpr double kPivotFloor = 1e-30;

/// Thomas algorithm. Throws SingularSystemError when a pivot magnitude drops
/// below kPivotFloor.
template <std::floating_point T>
std::vector<T> solve_tridiagonal(const BasicTridiagonal<T>& sys) {
  const std::size_t n = sys.size();
  if (sys.lower.size() != n || sys.upper.size() != n || sys.rhs.size() != n) {
    throw SizeMismatchError("tridiagonal coefficient arrays differ in length");
  }
  std::vector<T> c(n);
  std::vector<T> x(n);
  if (n == 0) return x;
  T pivot = sys.diag[0];
  if (std::abs(pivot) < T(kPivotFloor)) throw SingularSystemError("zero pivot in row 0");
  c[0] = n > 1 ? sys.upper[0] / pivot : T(0);
  x[0] = sys.rhs[0] / pivot;
  for (std::size_t k = 1; k < n; ++k) {
    pivot = sys.diag[k] - sys.lower[k] * c[k - 1];
    if (std::abs(pivot) < T(kPivotFloor)) {
      throw SingularSystemError("zero pivot in row " + std::to_string(k));
    }
    c[k] = k + 1 < n ? sys.upper[k] / pivot : T(0);
    x[k] = (sys.rhs[k] - sys.lower[k] * x[k - 1]) / pivot;
  }
  for (std::size_t k = n - 1; k-- > 0;) x[k] -= c[k] * x[k + 1];
  return x;
}

/// Centred mixed derivative d/dy (d/dx mx) on interior cells:
/// (Dx(i, j+1) - Dx(i, j-1)) / (2 dy), Dx(i, j) = (mx(i+1, j) - mx(i-1, j)) / (2 dx).
/// Reads the ghost ring, corners included. Ghost entries of the result are zero.
inline Field mixed_derivative(const Field& mx, const GridSpec& g) {
  if (!mx.matches(g)) throw SizeMismatchError("field size does not match the grid");
  Field out(g, 0.0);
  const double sx = 1.0 / (2.0 * g.dx);
  const double sy = 1.0 / (2.0 * g.dy);
  for (int j = 1; j <= g.ny; ++j) {
    for (int i = 1; i <= g.nx; ++i) {
      const double dx_up = (mx(i + 1, j + 1) - mx(i - 1, j + 1)) * sx;
      const double dx_dn = (mx(i + 1, j - 1) - mx(i - 1, j - 1)) * sx;
      out(i, j) = (dx_up - dx_dn) * sy;
    }
  }
  return out;
}

/// Parallel-momentum system of column i:
///   (eps/dt) my_j - T dt (my_{j+1} - 2 my_j + my_{j-1}) / dy^2
///     = T dt mixed_j + (eps/dt) my_j^m - div_y_j + n_j^m E_y,
/// with `div_y` the eps-scaled momentum-flux divergence (pressure included).
/// South/North Dirichlet values of my close the first and last rows.
inline TridiagonalSystem assemble_parallel_column(int i, const ConservedState& old,
                                                  const Field& mixed, const Field& div_y,
                                                  const PhysParams& p, double dt,
                                                  const BoundarySpec& bc) {
  const GridSpec& g = old.grid;
  const int ny = g.ny;
  const double shift = p.epsilon / dt;
  const double couple = p.temperature * dt / (g.dy * g.dy);
  TridiagonalSystem sys(static_cast<std::size_t>(ny));
  for (int j = 1; j <= ny; ++j) {
    const auto k = static_cast<std::size_t>(j - 1);
    sys.diag[k] = shift + 2.0 * couple;
    sys.lower[k] = j > 1 ? -couple : 0.0;
    sys.upper[k] = j < ny ? -couple : 0.0;
    sys.rhs[k] = p.temperature * dt * mixed(i, j) + shift * old.my(i, j) - div_y(i, j) +
                 old.n(i, j) * p.e_field[1];
  }
  sys.rhs.front() += couple * bc[Side::South].my;
  sys.rhs.back() += couple * bc[Side::North].my;
  return sys;
}

}  // namespace driftap
