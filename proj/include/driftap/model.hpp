#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "driftap/errors.hpp"
#include "driftap/mesh.hpp"

namespace driftap {

using Vec3 = std::array<double, 3>;

/// Scaled physical parameters. The magnetic field is B = (0, b_y, 0) and the
/// electric field E are uniform constants.
struct PhysParams {
  double epsilon{1e-6};
  double temperature{1.0};
  double b_y{1.0};
  Vec3 e_field{0.0, 0.0, 1.0};

  void validate() const {
    if (!(temperature > 0.0)) throw InvalidConfigError("temperature must be positive");
    if (b_y == 0.0 || !std::isfinite(b_y)) throw InvalidConfigError("B_y must be nonzero");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw InvalidConfigError("epsilon must be finite and >= 0");
    }
  }

  /// Parameters of the reference test case: T = 1, B_y = 1, E = (0, 0, 1).
  static PhysParams test_case(double epsilon) { return PhysParams{epsilon, 1.0, 1.0, {0, 0, 1}}; }

  friend bool operator==(const PhysParams&, const PhysParams&) = default;
};

/// c = sqrt(T / epsilon).
inline double sound_speed(const PhysParams& p) {
  if (p.epsilon == 0.0) throw DivisionByZeroError("sound speed is undefined for epsilon = 0");
  return std::sqrt(p.temperature / p.epsilon);
}

/// Cell-centred conserved fields with one ghost ring.
struct ConservedState {
  GridSpec grid{};
  Field n;
  Field mx;
  Field my;
  Field mz;

  ConservedState() = default;
  explicit ConservedState(const GridSpec& g)
      : grid(g), n(g, 1.0), mx(g, 0.0), my(g, 0.0), mz(g, 0.0) {}

  CellValues at(int i, int j) const { return {n(i, j), mx(i, j), my(i, j), mz(i, j)}; }

  void set(int i, int j, const CellValues& v) {
    n(i, j) = v.n;
    mx(i, j) = v.mx;
    my(i, j) = v.my;
    mz(i, j) = v.mz;
  }

  void fill(const CellValues& v) {
    n.fill(v.n);
    mx.fill(v.mx);
    my.fill(v.my);
    mz.fill(v.mz);
  }

  friend bool operator==(const ConservedState&, const ConservedState&) = default;
};

/// Applies the Dirichlet data of every side to the ghost ring of all four fields.
inline void fill_ghosts(ConservedState& s, const BoundarySpec& bc) {
  for (const Field* f : {&s.n, &s.mx, &s.my, &s.mz}) {
    if (!f->matches(s.grid)) throw SizeMismatchError("field size does not match the grid");
  }
  auto column = [&bc](double CellValues::*member) {
    return std::array<double, 4>{bc[Side::West].*member, bc[Side::East].*member,
                                 bc[Side::South].*member, bc[Side::North].*member};
  };
  fill_ghosts(s.n, column(&CellValues::n));
  fill_ghosts(s.mx, column(&CellValues::mx));
  fill_ghosts(s.my, column(&CellValues::my));
  fill_ghosts(s.mz, column(&CellValues::mz));
}

enum class CaseKind { Prepared, Unprepared };

inline const char* case_name(CaseKind k) {
  return k == CaseKind::Prepared ? "prepared" : "unprepared";
}

/// Test-case selection. For prepared data the perturbation amplitude equals
/// the model epsilon; for unprepared data it is set independently.
struct CaseSpec {
  CaseKind kind{CaseKind::Prepared};
  double epsilon{1e-6};
  double epsilon_prime{1e-2};

  double perturbation() const { return kind == CaseKind::Prepared ? epsilon : epsilon_prime; }

  static CaseSpec prepared(double eps) { return {CaseKind::Prepared, eps, eps}; }
  static CaseSpec unprepared(double eps, double eps_prime) {
    return {CaseKind::Unprepared, eps, eps_prime};
  }
};

/// Dirichlet data of the reference test case with perturbation amplitude p.
/// Side I is West (x = 0), II East (x = 1), III South (y = 0), IV North (y = 1).
inline BoundarySpec test_case_boundary(double p) {
  BoundarySpec bc;
  bc[Side::West] = {1.0 + p, -1.0, 1.0, 0.0};
  bc[Side::East] = {1.0, -1.0, 1.0 + p, p};
  bc[Side::South] = {1.0 + p, -1.0 + p, 1.0 + p, 0.0};
  bc[Side::North] = {1.0, -1.0 + p, 1.0, p};
  return bc;
}

/// Initial state (n = 1, zero momentum) and boundary data of the test case.
inline std::pair<ConservedState, BoundarySpec> init_case(const CaseSpec& c, const GridSpec& g) {
  const double p = c.perturbation();
  if (c.kind == CaseKind::Unprepared && !(c.epsilon_prime > 0.0)) {
    throw InvalidConfigError("epsilon_prime must be positive for unprepared data");
  }
  if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidConfigError("invalid perturbation amplitude");
  ConservedState s(g);
  s.fill({1.0, 0.0, 0.0, 0.0});
  BoundarySpec bc = test_case_boundary(p);
  bc.validate();
  fill_ghosts(s, bc);
  return {std::move(s), bc};
}

/// Exact, stationary and uniform drift-fluid solution of the test case.
inline constexpr CellValues drift_limit_state() { return {1.0, -1.0, 1.0, 0.0}; }

/// Perpendicular momentum of the drift-fluid limit, (1/B) b x (T grad n - n E),
/// for b along +y. Returns (n u_x, n u_z).
inline std::pair<double, double> drift_perp_momentum(double n, double dndx, const PhysParams& p) {
  const double vx = p.temperature * dndx - n * p.e_field[0];
  const double vz = -n * p.e_field[2];
  // y x v = (v_z, 0, -v_x)
  return {vz / p.b_y, -vx / p.b_y};
}

}  // namespace driftap
