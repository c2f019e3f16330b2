#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "driftap/errors.hpp"
#include "driftap/mesh.hpp"
#include "driftap/model.hpp"
#include "driftap/riemann.hpp"
#include "driftap/stepper.hpp"

namespace driftap {

/// Knobs of one simulation. Defaults reproduce the headline non-resolved AP run.
struct RunConfig {
  SchemeKind scheme{SchemeKind::AP};
  SpeedMode mode{SpeedMode::NonResolved};
  double epsilon{1e-6};
  double epsilon_prime{1e-2};
  CaseKind case_kind{CaseKind::Prepared};
  double cfl{0.5};
  int nx{100};
  int ny{100};
  double t_final{0.1};
  std::vector<double> snapshot_times{};
  std::string out_dir{"results"};
  /// Stop after this many steps (0: no limit). Used for time-step probes.
  long max_steps{0};

  /// DriftLimit runs always use eps = 0 and non-resolved speeds.
  RunConfig normalized() const {
    RunConfig c = *this;
    if (c.scheme == SchemeKind::DriftLimit) {
      c.epsilon = 0.0;
      c.mode = SpeedMode::NonResolved;
    }
    return c;
  }

  void validate() const {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) {
      throw InvalidConfigError("--t-final must be positive");
    }
    if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidConfigError("--cfl must lie in (0, 1]");
    if (nx < 2) throw InvalidConfigError("--nx must be >= 2");
    if (ny < 2) throw InvalidConfigError("--ny must be >= 2");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw InvalidConfigError("--epsilon must be finite and >= 0");
    }
    if (scheme != SchemeKind::DriftLimit && epsilon == 0.0) {
      throw InvalidConfigError(std::string("--epsilon: 0 is only valid with --scheme drift-limit (got ") +
                               scheme_name(scheme) + ")");
    }
    if (case_kind == CaseKind::Unprepared && !(epsilon_prime > 0.0)) {
      throw InvalidConfigError("--epsilon-prime must be positive");
    }
    if (max_steps < 0) throw InvalidConfigError("--max-steps must be >= 0");
    for (double t : snapshot_times) {
      if (!(t > 0.0 && t <= t_final)) {
        throw InvalidConfigError("--snapshot times must lie in (0, t_final]");
      }
    }
  }

  CaseSpec case_spec() const {
    return case_kind == CaseKind::Prepared ? CaseSpec::prepared(epsilon)
                                           : CaseSpec::unprepared(epsilon, epsilon_prime);
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Difference to the drift-fluid limit on interior cells: relative, in percent,
/// for n, n u_x and n u_y; absolute for n u_z.
struct DiffMetrics {
  double n{0.0};
  double mx{0.0};
  double my{0.0};
  double mz{0.0};
};

inline DiffMetrics diff_from_limit(const ConservedState& s) {
  const CellValues ref = drift_limit_state();
  DiffMetrics d;
  for (int j = 1; j <= s.grid.ny; ++j) {
    for (int i = 1; i <= s.grid.nx; ++i) {
      d.n = std::max(d.n, std::abs(s.n(i, j) - ref.n) / std::abs(ref.n) * 100.0);
      d.mx = std::max(d.mx, std::abs(s.mx(i, j) - ref.mx) / std::abs(ref.mx) * 100.0);
      d.my = std::max(d.my, std::abs(s.my(i, j) - ref.my) / std::abs(ref.my) * 100.0);
      d.mz = std::max(d.mz, std::abs(s.mz(i, j) - ref.mz));
    }
  }
  return d;
}

/// Field-wise max |a - b| / max |b| over interior cells, in percent.
inline CellValues relative_field_difference(const ConservedState& a, const ConservedState& b) {
  auto one = [&](const Field& fa, const Field& fb) {
    double diff = 0.0;
    double scale = 0.0;
    for (int j = 1; j <= a.grid.ny; ++j) {
      for (int i = 1; i <= a.grid.nx; ++i) {
        diff = std::max(diff, std::abs(fa(i, j) - fb(i, j)));
        scale = std::max(scale, std::abs(fb(i, j)));
      }
    }
    return scale > 0.0 ? diff / scale * 100.0 : diff * 100.0;
  };
  return {one(a.n, b.n), one(a.mx, b.mx), one(a.my, b.my), one(a.mz, b.mz)};
}

struct DtSample {
  long step{0};
  double t{0.0};
  double dt{0.0};
};

struct Snapshot {
  double t{0.0};
  ConservedState state;
};

struct RunReport {
  RunConfig config;
  DiffMetrics metrics;
  std::vector<DtSample> dt_log;
  std::vector<Snapshot> snapshots;
  ConservedState final_state;
  long steps{0};
  double t_end{0.0};
  double wall_seconds{0.0};
  bool diverged{false};
  /// Stopped by max_steps before t_final.
  bool truncated{false};
  std::string divergence;

  double max_dt() const {
    double m = 0.0;
    for (const auto& s : dt_log) m = std::max(m, s.dt);
    return m;
  }
  double mean_dt() const { return steps > 0 ? t_end / static_cast<double>(steps) : 0.0; }
};

/// Step size towards `target`: the CFL step, except that the last stretch is
/// split into at most two equal steps so the target is hit exactly without a
/// sliver step.
/// Every step allocates a few hundred kB of fields. glibc would hand the pages
/// back and fault them in again on each step, which costs as much as the step
/// itself on small grids.
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
#endif
}

inline double next_step(double dt_cfl, double remaining) {
  if (remaining <= dt_cfl * (1.0 + 1e-12)) return remaining;
  if (remaining < 2.0 * dt_cfl) return 0.5 * remaining;
  return dt_cfl;
}

inline PhysParams run_params(const RunConfig& c) { return PhysParams::test_case(c.epsilon); }

inline RunReport run(const RunConfig& config) {
  const RunConfig cfg = config.normalized();
  cfg.validate();
  const PhysParams params = run_params(cfg);
  const GridSpec grid = build_grid(cfg.nx, cfg.ny);
  auto [state, bc] = init_case(cfg.case_spec(), grid);

  fill_ghosts(state, bc);
  RunReport report;
  report.config = cfg;

  std::vector<double> targets = cfg.snapshot_times;
  targets.push_back(cfg.t_final);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const double dt_fallback = cfg.t_final / 10.0;
  const double dt_floor = cfg.t_final * 1e-14;
  double t = 0.0;
  std::size_t target_index = 0;
  std::chrono::steady_clock::duration busy{};

  while (target_index < targets.size()) {
    const double target = targets[target_index];
    if (cfg.max_steps > 0 && report.steps >= cfg.max_steps) {
      report.truncated = true;
      break;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const Primitives prim(state);
      const FaceSpeeds speeds(state, prim, cfg.mode, params);
      const double dt_cfl = compute_dt(speeds, grid, cfg.cfl, dt_fallback);
      const double dt = next_step(dt_cfl, target - t);
      if (!(dt > dt_floor)) {
        report.diverged = true;
        report.divergence = "time step collapsed at t = " + std::to_string(t);
        busy += std::chrono::steady_clock::now() - start;
        break;
      }
      StepResult r = step_prepared(cfg.scheme, state, prim, speeds, params, dt, bc);
      state = std::move(r.state);
      ++report.steps;
      const bool lands = dt == target - t;
      t = lands ? target : t + dt;
      report.dt_log.push_back({report.steps, t, dt});
    } catch (const Error& e) {
      busy += std::chrono::steady_clock::now() - start;
      report.diverged = true;
      report.divergence = std::string(e.what()) + " at t = " + std::to_string(t);
      break;
    }
    busy += std::chrono::steady_clock::now() - start;
    if (t == target) {
      report.snapshots.push_back({t, state});
      ++target_index;
    }
  }

  report.wall_seconds = std::chrono::duration<double>(busy).count();
  report.t_end = t;
  report.metrics = diff_from_limit(state);
  report.final_state = std::move(state);
  return report;
}

/// Runs the configurations on up to `workers` threads; results keep input order.
inline std::vector<RunReport> run_many(const std::vector<RunConfig>& configs, unsigned workers) {
  std::vector<RunReport> out(configs.size());
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(configs.size())));
  if (workers <= 1) {
    for (std::size_t k = 0; k < configs.size(); ++k) out[k] = run(configs[k]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(configs.size());
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < configs.size(); k = next++) {
        try {
          out[k] = run(configs[k]);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Worker cap from DRIFT_AP_THREADS (default 1).
inline unsigned worker_count() {
  if (const char* env = std::getenv("DRIFT_AP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Output

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string time_tag(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

/// Cell index whose span contains `coord`; the lower cell when it lies on a face.
inline int section_index(double coord, double origin, double h, int count) {
  const int k = static_cast<int>(std::ceil((coord - origin) / h - 1e-9));
  return std::clamp(k, 1, count);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

inline std::string dt_log_csv(const RunReport& r) {
  std::ostringstream os;
  os << "step,t,dt\n";
  for (const auto& s : r.dt_log) os << s.step << ',' << fmt17(s.t) << ',' << fmt17(s.dt) << '\n';
  return os.str();
}

inline std::string metrics_csv(const RunReport& r) {
  std::ostringstream os;
  os << "scheme,mode,epsilon,t_end,steps,diverged,n_rel_pct,mx_rel_pct,my_rel_pct,mz_abs,"
        "wall_seconds\n";
  os << scheme_name(r.config.scheme) << ',' << mode_name(r.config.mode) << ','
     << fmt17(r.config.epsilon) << ',' << fmt17(r.t_end) << ',' << r.steps << ','
     << (r.diverged ? 1 : 0) << ',' << fmt17(r.metrics.n) << ',' << fmt17(r.metrics.mx) << ','
     << fmt17(r.metrics.my) << ',' << fmt17(r.metrics.mz) << ',' << fmt17(r.wall_seconds) << '\n';
  return os.str();
}

inline std::string snapshot_csv(const ConservedState& s) {
  std::ostringstream os;
  os << "i,j,x,y,n,mx,my,mz\n";
  for (int j = 1; j <= s.grid.ny; ++j) {
    for (int i = 1; i <= s.grid.nx; ++i) {
      os << i << ',' << j << ',' << fmt17(s.grid.x_center(i)) << ',' << fmt17(s.grid.y_center(j))
         << ',' << fmt17(s.n(i, j)) << ',' << fmt17(s.mx(i, j)) << ',' << fmt17(s.my(i, j)) << ','
         << fmt17(s.mz(i, j)) << '\n';
    }
  }
  return os.str();
}

/// Values along y = 0.5 (axis X) or x = 0.5 (axis Y).
inline std::string section_csv(const ConservedState& s, Axis along) {
  std::ostringstream os;
  const GridSpec& g = s.grid;
  if (along == Axis::X) {
    const int j = section_index(0.5, g.domain.y0, g.dy, g.ny);
    os << "i,x,n,mx,my,mz\n";
    for (int i = 1; i <= g.nx; ++i) {
      os << i << ',' << fmt17(g.x_center(i)) << ',' << fmt17(s.n(i, j)) << ','
         << fmt17(s.mx(i, j)) << ',' << fmt17(s.my(i, j)) << ',' << fmt17(s.mz(i, j)) << '\n';
    }
  } else {
    const int i = section_index(0.5, g.domain.x0, g.dx, g.nx);
    os << "j,y,n,mx,my,mz\n";
    for (int j = 1; j <= g.ny; ++j) {
      os << j << ',' << fmt17(g.y_center(j)) << ',' << fmt17(s.n(i, j)) << ','
         << fmt17(s.mx(i, j)) << ',' << fmt17(s.my(i, j)) << ',' << fmt17(s.mz(i, j)) << '\n';
    }
  }
  return os.str();
}

// Minimal SVG line charts.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

inline std::string svg_chart(const std::string& title, const std::string& xlabel,
                             const std::vector<Series>& series, bool log_y = false) {
  const double w = 480, h = 320, ml = 70, mr = 20, mt = 30, mb = 45;
  double x0 = std::numeric_limits<double>::max(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, ty(s.y[k]));
      y1 = std::max(y1, ty(s.y[k]));
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    const double pad = std::max(std::abs(y0) * 1e-6, 1e-12);
    y0 -= pad;
    y1 += pad;
  }
  auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (w - ml - mr); };
  auto py = [&](double v) { return h - mb - (ty(v) - y0) / (y1 - y0) * (h - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << title
     << "</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 8
     << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0;
    const double fy = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << px(fx) << "\" y=\"" << h - mb + 15
       << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt_short(fx) << "</text>\n";
    os << "<text x=\"" << ml - 5 << "\" y=\"" << h - mb - (fy - y0) / (y1 - y0) * (h - mt - mb) + 3
       << "\" text-anchor=\"end\" font-size=\"10\">"
       << (log_y ? "1e" + fmt_short(fy) : fmt_short(fy)) << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[s % 4] << "\" points=\"";
    for (std::size_t k = 0; k < series[s].x.size(); ++k) {
      os << px(series[s].x[k]) << ',' << py(series[s].y[k]) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << w - mr - 5 << "\" y=\"" << mt + 14 * (s + 1)
       << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << colors[s % 4] << "\">"
       << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline std::string section_svg(const ConservedState& s, const std::string& label,
                               const std::string& field, Axis along) {
  const GridSpec& g = s.grid;
  Series ser{label, {}, {}};
  const Field& f = field == "n" ? s.n : field == "mx" ? s.mx : field == "my" ? s.my : s.mz;
  if (along == Axis::X) {
    const int j = section_index(0.5, g.domain.y0, g.dy, g.ny);
    for (int i = 1; i <= g.nx; ++i) {
      ser.x.push_back(g.x_center(i));
      ser.y.push_back(f(i, j));
    }
  } else {
    const int i = section_index(0.5, g.domain.x0, g.dx, g.nx);
    for (int j = 1; j <= g.ny; ++j) {
      ser.x.push_back(g.y_center(j));
      ser.y.push_back(f(i, j));
    }
  }
  Series limit{"drift limit", ser.x, {}};
  const CellValues ref = drift_limit_state();
  const double rv = field == "n" ? ref.n : field == "mx" ? ref.mx : field == "my" ? ref.my : ref.mz;
  limit.y.assign(ser.x.size(), rv);
  return svg_chart(field + (along == Axis::X ? " along y = 0.5" : " along x = 0.5"),
                   along == Axis::X ? "x" : "y", {ser, limit});
}

/// Writes dt_log.csv, metrics.csv, per-snapshot fields and sections, and SVG plots.
inline void write_run_outputs(const RunReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "dt_log.csv", dt_log_csv(r));
  write_text(dir / "metrics.csv", metrics_csv(r));
  std::vector<Snapshot> snaps = r.snapshots;
  if (snaps.empty() || snaps.back().t != r.t_end) snaps.push_back({r.t_end, r.final_state});
  const std::string label = std::string(scheme_name(r.config.scheme)) + " " +
                            mode_name(r.config.mode);
  for (const auto& s : snaps) {
    const std::string tag = time_tag(s.t);
    write_text(dir / ("snapshot_" + tag + ".csv"), snapshot_csv(s.state));
    write_text(dir / ("section_y0.5_" + tag + ".csv"), section_csv(s.state, Axis::X));
    write_text(dir / ("section_x0.5_" + tag + ".csv"), section_csv(s.state, Axis::Y));
    for (const char* field : {"n", "mx", "my", "mz"}) {
      write_text(dir / ("section_y0.5_" + tag + "_" + field + ".svg"),
                 section_svg(s.state, label, field, Axis::X));
    }
  }
  Series dts{label, {}, {}};
  for (const auto& s : r.dt_log) {
    dts.x.push_back(s.t);
    dts.y.push_back(s.dt);
  }
  write_text(dir / "dt_history.svg", svg_chart("time step", "t", {dts}, true));
}

// ---------------------------------------------------------------------------
// Table reproduction

struct Table {
  std::string name;
  std::string caption;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
      os << '\n';
    }
    return os.str();
  }

  std::string markdown() const {
    std::ostringstream os;
    os << "### " << caption << "\n\n|";
    for (const auto& h : header) os << ' ' << h << " |";
    os << "\n|";
    for (std::size_t k = 0; k < header.size(); ++k) os << "---|";
    os << '\n';
    for (const auto& row : rows) {
      os << '|';
      for (const auto& c : row) os << ' ' << c << " |";
      os << '\n';
    }
    return os.str();
  }
};

struct SweepPoint {
  double epsilon;
  double t_final;
};

/// The three regimes of the error tables.
inline std::vector<SweepPoint> epsilon_sweep() { return {{1e-5, 1.0}, {1e-6, 0.1}, {1.5e-8, 0.01}}; }

struct TableOptions {
  int nx{100};
  int ny{100};
  double cfl{0.5};
  /// Steps run per configuration for the time-step table; 0 runs to t_final.
  long dt_probe_steps{200};
  unsigned workers{1};
};

inline const std::vector<std::string>& table_presets() {
  static const std::vector<std::string> p{"errors-resolved", "errors-nonresolved", "dt-table",
                                          "cpu-table",       "eps1-compare",       "unprepared"};
  return p;
}

namespace detail {

inline RunConfig table_config(const TableOptions& o, SchemeKind scheme, SpeedMode mode,
                              double eps, double t_final) {
  RunConfig c;
  c.scheme = scheme;
  c.mode = mode;
  c.epsilon = eps;
  c.t_final = t_final;
  c.nx = o.nx;
  c.ny = o.ny;
  c.cfl = o.cfl;
  return c;
}

inline std::string status(const RunReport& r) {
  return r.diverged ? "diverged (" + r.divergence + ")" : r.truncated ? "truncated" : "ok";
}

inline Table error_table(const std::string& name, const std::string& caption,
                         const std::vector<RunReport>& reports) {
  Table t{name, caption,
          {"epsilon", "t_final", "n (%)", "nu_x (%)", "nu_y (%)", "nu_z (abs)", "nu_z (abs x100)",
           "steps", "status"},
          {}};
  for (const auto& r : reports) {
    t.rows.push_back({fmt_short(r.config.epsilon), fmt_short(r.config.t_final),
                      fmt_short(r.metrics.n), fmt_short(r.metrics.mx), fmt_short(r.metrics.my),
                      fmt_short(r.metrics.mz), fmt_short(100.0 * r.metrics.mz),
                      std::to_string(r.steps), status(r)});
  }
  return t;
}

}  // namespace detail

/// Runs the sweep behind one preset and returns its tables.
inline std::vector<Table> reproduce_tables(const std::string& preset, const TableOptions& o = {}) {
  using detail::table_config;
  const auto sweep = epsilon_sweep();
  auto sweep_configs = [&](SchemeKind scheme, SpeedMode mode) {
    std::vector<RunConfig> cs;
    for (const auto& p : sweep) cs.push_back(table_config(o, scheme, mode, p.epsilon, p.t_final));
    return cs;
  };

  if (preset == "errors-resolved" || preset == "errors-nonresolved") {
    const SpeedMode mode =
        preset == "errors-resolved" ? SpeedMode::Resolved : SpeedMode::NonResolved;
    const std::string tag = mode_name(mode);
    auto conv = run_many(sweep_configs(SchemeKind::Conventional, mode), o.workers);
    auto ap = run_many(sweep_configs(SchemeKind::AP, mode), o.workers);
    return {detail::error_table("conventional_" + tag,
                                "Max difference to the drift limit, " + tag + " conventional scheme",
                                conv),
            detail::error_table("ap_" + tag,
                                "Max difference to the drift limit, " + tag + " AP scheme", ap)};
  }
  if (preset == "dt-table") {
    auto cs = sweep_configs(SchemeKind::AP, SpeedMode::Resolved);
    auto ns = sweep_configs(SchemeKind::AP, SpeedMode::NonResolved);
    for (auto& c : cs) c.max_steps = o.dt_probe_steps;
    for (auto& c : ns) c.max_steps = o.dt_probe_steps;
    auto ap = run_many(cs, o.workers);
    auto nap = run_many(ns, o.workers);
    Table t{"dt_table", "log10 of the gyro-period and of the largest time step",
            {"epsilon", "tau", "AP", "NAP", "AP steps", "NAP steps"},
            {}};
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      char a[32], b[32], c[32];
      std::snprintf(a, sizeof a, "%.2f", std::log10(sweep[k].epsilon));
      std::snprintf(b, sizeof b, "%.2f", std::log10(ap[k].max_dt()));
      std::snprintf(c, sizeof c, "%.2f", std::log10(nap[k].max_dt()));
      t.rows.push_back({fmt_short(sweep[k].epsilon), a, b, c, std::to_string(ap[k].steps),
                        std::to_string(nap[k].steps)});
    }
    return {t};
  }
  if (preset == "cpu-table") {
    // Timings need the CPU to themselves.
    auto conv = run_many(sweep_configs(SchemeKind::Conventional, SpeedMode::Resolved), 1);
    auto nap = run_many(sweep_configs(SchemeKind::AP, SpeedMode::NonResolved), 1);
    Table t{"cpu_table", "Wall time of resolved conventional vs non-resolved AP runs",
            {"epsilon", "t_final", "CONV (s)", "NAP (s)", "CONV/NAP", "CONV steps", "NAP steps"},
            {}};
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      t.rows.push_back({fmt_short(sweep[k].epsilon), fmt_short(sweep[k].t_final),
                        fmt_short(conv[k].wall_seconds), fmt_short(nap[k].wall_seconds),
                        fmt_short(conv[k].wall_seconds / nap[k].wall_seconds),
                        std::to_string(conv[k].steps), std::to_string(nap[k].steps)});
    }
    return {t};
  }
  if (preset == "eps1-compare") {
    auto rs = run_many({table_config(o, SchemeKind::AP, SpeedMode::Resolved, 1.0, 1.0),
                        table_config(o, SchemeKind::Conventional, SpeedMode::Resolved, 1.0, 1.0)},
                       o.workers);
    const CellValues d = relative_field_difference(rs[0].final_state, rs[1].final_state);
    Table t{"eps1_compare", "Resolved AP vs resolved conventional at epsilon = 1, t = 1",
            {"field", "max |AP - CONV| / max |CONV| (%)"},
            {}};
    t.rows.push_back({"n", fmt_short(d.n)});
    t.rows.push_back({"nu_x", fmt_short(d.mx)});
    t.rows.push_back({"nu_y", fmt_short(d.my)});
    t.rows.push_back({"nu_z", fmt_short(d.mz)});
    return {t};
  }
  if (preset == "unprepared") {
    std::vector<RunConfig> cs;
    for (SpeedMode m : {SpeedMode::Resolved, SpeedMode::NonResolved}) {
      RunConfig c = table_config(o, SchemeKind::AP, m, 1e-6, 0.1);
      c.case_kind = CaseKind::Unprepared;
      c.epsilon_prime = 1e-2;
      cs.push_back(c);
    }
    auto rs = run_many(cs, o.workers);
    Table t = detail::error_table("unprepared",
                                  "Unprepared data (epsilon' = 1e-2), AP schemes at epsilon = 1e-6",
                                  rs);
    t.header.insert(t.header.begin(), "mode");
    t.rows[0].insert(t.rows[0].begin(), "resolved");
    t.rows[1].insert(t.rows[1].begin(), "nonresolved");
    return {t};
  }
  throw InvalidConfigError("unknown table preset: " + preset);
}

inline void write_tables(const std::vector<Table>& tables, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string md;
  for (const auto& t : tables) {
    write_text(dir / (t.name + ".csv"), t.csv());
    md += t.markdown() + "\n";
  }
  write_text(dir / "tables.md", md);
}

}  // namespace driftap
