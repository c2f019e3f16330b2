#include <gtest/gtest.h>

#include "driftap/check.hpp"

using namespace driftap;

TEST(PropertySuite, AllPass) {
  for (const auto& r : run_property_suite()) EXPECT_TRUE(r.ok) << r.name << ": " << r.detail;
}

TEST(MassBalance, RealStepBalances) {
  auto [s, bc] = init_case(CaseSpec::unprepared(1e-6, 0.05), build_grid(12, 10));
  const PhysParams p = PhysParams::test_case(1e-6);
  const double dt = compute_dt(s, SpeedMode::NonResolved, p, 0.5);
  const auto next = step_ap(s, p, dt, SpeedMode::NonResolved, bc).state;
  const MassBalance b = mass_balance(s, next, SchemeKind::AP, SpeedMode::NonResolved, p, bc, dt);
  EXPECT_GT(std::abs(b.outflow), 1e-6);
  EXPECT_LE(b.relative(), 1e-12);
}

TEST(MassBalance, WrongMomentaAreDetected) {
  // the AP step transports mass with the new momenta, not the old ones
  auto [s, bc] = init_case(CaseSpec::prepared(1e-6), build_grid(12, 10));
  const PhysParams p = PhysParams::test_case(1e-6);
  const double dt = compute_dt(s, SpeedMode::NonResolved, p, 0.5);
  const auto next = step_ap(s, p, dt, SpeedMode::NonResolved, bc).state;
  const MassBalance b =
      mass_balance(s, next, SchemeKind::Conventional, SpeedMode::NonResolved, p, bc, dt);
  EXPECT_GT(b.relative(), 1e-10);
}

TEST(Conservation, CorruptedFluxSignFails) {
  // Flips the sign of one interior x-face flux as seen by its left cell only.
  const Stepper corrupted = [](SchemeKind k, const ConservedState& s, const PhysParams& p,
                               double dt, SpeedMode m, const BoundarySpec& bc) {
    StepResult r = step(k, s, p, dt, m, bc);
    ConservedState old = s;
    fill_ghosts(old, bc);
    const ConservedState& mom = k == SchemeKind::Conventional ? old : r.state;
    const int i = 3;
    const int j = 4;
    const auto l = CellState::from_conserved(old.at(i, j));
    const auto rr = CellState::from_conserved(old.at(i + 1, j));
    PhysParams q = p;
    if (k == SchemeKind::DriftLimit) q.epsilon = 0.0;
    const SpeedMode mode = k == SchemeKind::DriftLimit ? SpeedMode::NonResolved : m;
    const double a = interface_speed(l, rr, Axis::X, mode, q);
    const double f = mass_flux(mom.mx(i, j), mom.mx(i + 1, j), a, old.n(i, j), old.n(i + 1, j));
    r.state.n(i, j) += 2.0 * dt / s.grid.dx * f;
    return r;
  };
  const PropertyResult bad = check_conservation(corrupted);
  EXPECT_FALSE(bad.ok) << bad.detail;
  EXPECT_TRUE(check_conservation().ok);
}

TEST(FixedPoint, SmallGrid) {
  const PropertyResult r = check_fixed_point(8, 6, 20);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(PerpResidual, ExactSolutionIsZero) {
  EXPECT_EQ(perp_residual_ulps({1.0, 1.0, 1.0}, 1.0, 0.0), 0.0);
  EXPECT_GT(perp_residual_ulps({1.0, 1.0, 1.0}, 1.0 + 1e-10, 0.0), 100.0);
}
