#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "driftap/harness.hpp"

using namespace driftap;

namespace {

ConservedState drift_state(int n) {
  ConservedState s(build_grid(n, n));
  s.fill(drift_limit_state());
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream b;
  b << f.rdbuf();
  return b.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("driftap_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Metrics, ExactDriftStateIsZero) {
  const DiffMetrics d = diff_from_limit(drift_state(5));
  EXPECT_EQ(d.n, 0.0);
  EXPECT_EQ(d.mx, 0.0);
  EXPECT_EQ(d.my, 0.0);
  EXPECT_EQ(d.mz, 0.0);
}

TEST(Metrics, RelativeDensityInPercent) {
  ConservedState s = drift_state(5);
  s.n.fill(1.001);
  EXPECT_NEAR(diff_from_limit(s).n, 0.1, 1e-12);
}

TEST(Metrics, AbsoluteParallelMomentumComponent) {
  ConservedState s = drift_state(5);
  s.mz(3, 2) = 0.002;
  s.mz(0, 2) = 5.0;  // ghosts do not count
  const DiffMetrics d = diff_from_limit(s);
  EXPECT_EQ(d.mz, 0.002);
  EXPECT_EQ(d.n, 0.0);
}

TEST(Metrics, UniformShiftScalesByHundred) {
  for (double delta : {1e-6, 3e-4, 0.02}) {
    ConservedState s = drift_state(4);
    for (double& v : s.n.values()) v += delta;
    EXPECT_NEAR(diff_from_limit(s).n, 100.0 * delta, 1e-12);
  }
}

TEST(Metrics, FieldDifference) {
  ConservedState a = drift_state(4);
  ConservedState b = a;
  a.my(2, 2) = 1.005;
  const CellValues d = relative_field_difference(a, b);
  EXPECT_NEAR(d.my, 0.5, 1e-10);
  EXPECT_EQ(d.n, 0.0);
}

TEST(NextStep, LandsWithoutSliver) {
  EXPECT_EQ(next_step(1.0, 5.0), 1.0);
  EXPECT_EQ(next_step(1.0, 1.0), 1.0);
  EXPECT_EQ(next_step(1.0, 0.3), 0.3);
  EXPECT_EQ(next_step(1.0, 1.5), 0.75);
  EXPECT_EQ(next_step(1.0, 1.999), 0.9995);
}

TEST(Run, HeadlineNonResolvedAP) {
  const RunReport r = run(RunConfig{});
  EXPECT_FALSE(r.diverged);
  EXPECT_EQ(r.t_end, 0.1);
  EXPECT_NEAR(static_cast<double>(r.steps), 40.0, 2.0);
  EXPECT_NEAR(r.max_dt(), 2.5e-3, 1e-6);
  EXPECT_LT(r.metrics.n, 1e-3);
  EXPECT_EQ(r.dt_log.size(), static_cast<std::size_t>(r.steps));
  double t = 0.0;
  for (const auto& s : r.dt_log) t += s.dt;
  EXPECT_NEAR(t, 0.1, 1e-15);
}

TEST(Run, DriftLimitSitsOnTheReference) {
  RunConfig c;
  c.scheme = SchemeKind::DriftLimit;
  c.epsilon = 0.3;  // forced to zero
  c.nx = c.ny = 30;
  const RunReport r = run(c);
  EXPECT_EQ(r.config.epsilon, 0.0);
  EXPECT_LT(r.metrics.n, 1e-10);
  EXPECT_LT(r.metrics.my, 1e-10);
}

TEST(Run, Deterministic) {
  RunConfig c;
  c.nx = c.ny = 24;
  c.case_kind = CaseKind::Unprepared;
  c.mode = SpeedMode::Resolved;
  c.epsilon = 1e-3;
  c.t_final = 0.02;
  const RunReport a = run(c);
  const RunReport b = run(c);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(a.final_state, b.final_state);
  ASSERT_EQ(a.dt_log.size(), b.dt_log.size());
  for (std::size_t k = 0; k < a.dt_log.size(); ++k) EXPECT_EQ(a.dt_log[k].dt, b.dt_log[k].dt);
  EXPECT_EQ(a.metrics.my, b.metrics.my);
}

TEST(Run, NonResolvedTimeStepsIgnoreEpsilon) {
  RunConfig c;
  c.case_kind = CaseKind::Unprepared;
  c.snapshot_times = {0.0025, 0.01, 0.05};
  const RunReport r = run(c);
  ASSERT_EQ(r.snapshots.size(), 4u);
  for (const auto& snap : r.snapshots) {
    const double ref = compute_dt(snap.state, SpeedMode::NonResolved, PhysParams::test_case(1e-6), 0.5);
    for (double eps : {1.0, 1e-5, 1.5e-8, 0.0}) {
      const double dt = compute_dt(snap.state, SpeedMode::NonResolved, PhysParams::test_case(eps), 0.5);
      EXPECT_NEAR(dt / ref, 1.0, 0.01) << "t " << snap.t << " eps " << eps;
    }
  }
}

TEST(Run, StepLimitTruncates) {
  RunConfig c;
  c.max_steps = 5;
  const RunReport r = run(c);
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.diverged);
  EXPECT_EQ(r.steps, 5);
  EXPECT_LT(r.t_end, c.t_final);
}

TEST(Run, HitsSnapshotTimes) {
  RunConfig c;
  c.nx = c.ny = 20;
  c.snapshot_times = {0.0101, 0.05};
  const RunReport r = run(c);
  ASSERT_EQ(r.snapshots.size(), 3u);
  EXPECT_EQ(r.snapshots[0].t, 0.0101);
  EXPECT_EQ(r.snapshots[1].t, 0.05);
  EXPECT_EQ(r.snapshots[2].t, 0.1);
}

TEST(Run, RejectsInvalidConfig) {
  RunConfig c;
  c.scheme = SchemeKind::Conventional;
  c.epsilon = 0.0;
  EXPECT_THROW(run(c), InvalidConfigError);
  c = RunConfig{};
  c.cfl = 1.5;
  EXPECT_THROW(run(c), InvalidConfigError);
  c = RunConfig{};
  c.snapshot_times = {0.5};
  EXPECT_THROW(run(c), InvalidConfigError);
}

TEST(Run, DivergenceKeepsLastFiniteMetrics) {
  RunConfig c;
  c.scheme = SchemeKind::Conventional;
  c.nx = c.ny = 20;
  c.t_final = 0.5;
  const RunReport r = run(c);
  EXPECT_TRUE(r.diverged || r.metrics.n > 10.0);
  EXPECT_TRUE(std::isfinite(r.metrics.n));
  if (r.diverged) {
    EXPECT_FALSE(r.divergence.empty());
  }
}

TEST(RunMany, KeepsInputOrder) {
  std::vector<RunConfig> cs(3);
  for (int k = 0; k < 3; ++k) {
    cs[k].nx = cs[k].ny = 12;
    cs[k].t_final = 0.01 * (k + 1);
  }
  const auto serial = run_many(cs, 1);
  const auto parallel = run_many(cs, 3);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(serial[k].t_end, cs[k].t_final);
    EXPECT_EQ(parallel[k].final_state, serial[k].final_state);
  }
}

TEST(Sections, ContainingCellLowerOnFace) {
  EXPECT_EQ(section_index(0.5, 0.0, 0.01, 100), 50);
  EXPECT_EQ(section_index(0.5, 0.0, 1.0 / 3.0, 3), 2);
  EXPECT_EQ(section_index(0.5, 0.0, 0.25, 4), 2);
  EXPECT_EQ(section_index(0.0, 0.0, 0.25, 4), 1);
}

TEST(Outputs, FilesAndFormat) {
  RunConfig c;
  c.nx = 10;
  c.ny = 8;
  c.t_final = 0.02;
  c.snapshot_times = {0.01};
  const RunReport r = run(c);
  const auto dir = scratch("outputs");
  write_run_outputs(r, dir);
  for (const char* f : {"dt_log.csv", "metrics.csv", "snapshot_0.01.csv", "snapshot_0.02.csv",
                        "section_y0.5_0.02.csv", "section_x0.5_0.02.csv", "dt_history.svg",
                        "section_y0.5_0.02_n.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  const std::string dt = slurp(dir / "dt_log.csv");
  EXPECT_EQ(dt.rfind("step,t,dt\n", 0), 0u);
  const std::string snap = slurp(dir / "snapshot_0.02.csv");
  EXPECT_EQ(snap.rfind("i,j,x,y,n,mx,my,mz\n", 0), 0u);
  EXPECT_EQ(std::count(snap.begin(), snap.end(), '\n'), 1 + 10 * 8);
  const std::string sec = slurp(dir / "section_x0.5_0.02.csv");
  EXPECT_EQ(std::count(sec.begin(), sec.end(), '\n'), 1 + 8);
  std::filesystem::remove_all(dir);
}

TEST(Outputs, SeventeenDigitRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 2.4975024975024975e-06, -1e-300}) {
    EXPECT_EQ(std::stod(fmt17(v)), v);
  }
}

TEST(Tables, CsvAndMarkdown) {
  Table t{"demo", "Demo table", {"a", "b"}, {{"1", "2"}}};
  EXPECT_EQ(t.csv(), "a,b\n1,2\n");
  EXPECT_NE(t.markdown().find("| a | b |"), std::string::npos);
  EXPECT_NE(t.markdown().find("|---|---|"), std::string::npos);
}

TEST(Tables, UnknownPreset) {
  EXPECT_THROW(reproduce_tables("nope"), InvalidConfigError);
}

TEST(Tables, UnitEpsilonComparisonOnCoarseGrid) {
  TableOptions o;
  o.nx = o.ny = 16;
  const auto tables = reproduce_tables("eps1-compare", o);
  ASSERT_EQ(tables.size(), 1u);
  ASSERT_EQ(tables[0].rows.size(), 4u);
  for (const auto& row : tables[0].rows) EXPECT_LT(std::stod(row[1]), 5.0) << row[0];
}

TEST(Tables, UnitEpsilonGapIsFirstOrderInTime) {
  // AP and conventional steps differ by O(dt); halving the CFL number halves the gap.
  auto gap = [](double cfl) {
    RunConfig a;
    a.mode = SpeedMode::Resolved;
    a.epsilon = 1.0;
    a.t_final = 1.0;
    a.nx = a.ny = 16;
    a.cfl = cfl;
    RunConfig c = a;
    c.scheme = SchemeKind::Conventional;
    return relative_field_difference(run(a).final_state, run(c).final_state);
  };
  const CellValues coarse = gap(0.5);
  const CellValues fine = gap(0.25);
  EXPECT_NEAR(coarse.n / fine.n, 2.0, 0.3);
  EXPECT_NEAR(coarse.mx / fine.mx, 2.0, 0.3);
  EXPECT_NEAR(coarse.my / fine.my, 2.0, 0.3);
  EXPECT_NEAR(coarse.mz / fine.mz, 2.0, 0.3);
}

TEST(Tables, TimeStepTableProbe) {
  TableOptions o;
  o.nx = o.ny = 100;
  o.dt_probe_steps = 3;
  const auto t = reproduce_tables("dt-table", o)[0];
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& row : t.rows) EXPECT_NEAR(std::stod(row[3]), -2.6, 0.1);
  EXPECT_NEAR(std::stod(t.rows[1][2]), -5.6, 0.1);
}
