#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "driftap/check.hpp"
#include "driftap/errors.hpp"
#include "driftap/harness.hpp"

namespace driftap::cli {

/// Invalid command line; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct CliArgs {
  std::string subcommand;
  RunConfig run;
  std::string preset;
  /// Output directory of `tables`; `run` keeps its own in RunConfig.
  std::string out{"results"};
  bool strict{false};
  /// Time-step table runs each configuration to t_final instead of probing.
  bool full{false};
  long probe_steps{200};
  /// Help text when --help was given; nothing is executed then.
  std::string help;
};

inline SchemeKind parse_scheme(const std::string& s) {
  if (s == "ap") return SchemeKind::AP;
  if (s == "conventional") return SchemeKind::Conventional;
  if (s == "drift-limit") return SchemeKind::DriftLimit;
  throw UsageError("--scheme: unknown scheme " + s);
}

inline SpeedMode parse_mode(const std::string& s) {
  if (s == "resolved") return SpeedMode::Resolved;
  if (s == "nonresolved") return SpeedMode::NonResolved;
  throw UsageError("--mode: unknown mode " + s);
}

inline CaseKind parse_case(const std::string& s) {
  if (s == "prepared") return CaseKind::Prepared;
  if (s == "unprepared") return CaseKind::Unprepared;
  throw UsageError("--case: unknown case " + s);
}

/// Flat key=value text mirroring the flag names; parse(render(c)) == c.
inline std::string render_config(const RunConfig& c) {
  std::ostringstream os;
  os << "# resolved run configuration\n";
  os << "# boundary sides: I = West (x = 0), II = East (x = 1), III = South (y = 0), "
        "IV = North (y = 1)\n";
  os << "# ghost ring filled West, East, South, North; corners take the South/North values\n";
  os << "scheme = " << scheme_name(c.scheme) << '\n';
  os << "mode = " << mode_name(c.mode) << '\n';
  os << "epsilon = " << fmt17(c.epsilon) << '\n';
  os << "epsilon-prime = " << fmt17(c.epsilon_prime) << '\n';
  os << "case = " << case_name(c.case_kind) << '\n';
  os << "cfl = " << fmt17(c.cfl) << '\n';
  os << "nx = " << c.nx << '\n';
  os << "ny = " << c.ny << '\n';
  os << "t-final = " << fmt17(c.t_final) << '\n';
  os << "max-steps = " << c.max_steps << '\n';
  if (!c.snapshot_times.empty()) {
    os << "snapshot = ";
    for (std::size_t k = 0; k < c.snapshot_times.size(); ++k) {
      os << (k ? "," : "") << fmt17(c.snapshot_times[k]);
    }
    os << '\n';
  }
  os << "out = " << c.out_dir << '\n';
  return os.str();
}

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"scheme", "mode",    "epsilon", "epsilon-prime",
                                             "case",   "cfl",     "nx",      "ny",
                                             "t-final", "max-steps", "snapshot", "out"};
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Reads key=value lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> read_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--config: line " + std::to_string(number) + " is not key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw UsageError("--config: unknown key '" + key + "' on line " + std::to_string(number));
    }
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

namespace detail {

inline bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

/// Value of --config in `args`, if any.
inline std::string config_path(const std::vector<std::string>& args) {
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config") {
      if (k + 1 >= args.size()) throw UsageError("--config: missing file name");
      return args[k + 1];
    }
    if (args[k].rfind("--config=", 0) == 0) return args[k].substr(9);
  }
  return "";
}

/// Config-file entries become flags placed before the command-line ones, so
/// the command line wins for every key it sets.
inline std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  const std::string path = config_path(args);
  if (path.empty() || args.empty()) return args;
  std::ifstream f(path);
  if (!f) throw UsageError("--config: cannot read " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  std::vector<std::string> merged{args.front()};
  for (const auto& [key, value] : read_config_text(buf.str())) {
    if (has_flag(args, "--" + key)) continue;
    merged.push_back("--" + key);
    merged.push_back(value);
  }
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

}  // namespace detail

/// Parses the arguments after the program name.
inline CliArgs parse(const std::vector<std::string>& raw) {
  const std::vector<std::string> args = detail::merge_config(raw);
  CliArgs out;
  RunConfig& c = out.run;
  std::string scheme = scheme_name(c.scheme);
  std::string mode = mode_name(c.mode);
  std::string data = case_name(c.case_kind);
  std::string config_file;

  CLI::App app{"Asymptotic-preserving Euler-Lorentz solver", "driftap"};
  app.require_subcommand(1);
  auto* run_cmd = app.add_subcommand("run", "Run one simulation and write its outputs");
  run_cmd->add_option("--scheme", scheme, "ap | conventional | drift-limit")
      ->check(CLI::IsMember({"ap", "conventional", "drift-limit"}));
  run_cmd->add_option("--mode", mode, "resolved | nonresolved")
      ->check(CLI::IsMember({"resolved", "nonresolved"}));
  run_cmd->add_option("--epsilon", c.epsilon, "Scaled gyro-period")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--epsilon-prime", c.epsilon_prime, "Perturbation of unprepared data")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--case", data, "prepared | unprepared")
      ->check(CLI::IsMember({"prepared", "unprepared"}));
  run_cmd->add_option("--cfl", c.cfl, "CFL number")->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--nx", c.nx, "Cells in x")->check(CLI::Range(2, 100000));
  run_cmd->add_option("--ny", c.ny, "Cells in y")->check(CLI::Range(2, 100000));
  run_cmd->add_option("--t-final", c.t_final, "Final time")->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-steps", c.max_steps, "Stop after this many steps (0: no limit)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--snapshot", c.snapshot_times, "Extra output times")->delimiter(',');
  run_cmd->add_option("--out", c.out_dir, "Output directory");
  run_cmd->add_option("--config", config_file, "key = value file; flags override it");
  run_cmd->add_flag("--strict", out.strict, "Exit 1 when the run diverges");

  auto* tables_cmd = app.add_subcommand("tables", "Reproduce the error, time-step and cost tables");
  std::vector<std::string> presets = table_presets();
  presets.push_back("all");
  tables_cmd->add_option("--preset", out.preset, "Table preset or 'all'")
      ->required()
      ->check(CLI::IsMember(presets));
  tables_cmd->add_option("--out", out.out, "Output directory");
  tables_cmd->add_option("--nx", c.nx, "Cells in x")->check(CLI::Range(2, 100000));
  tables_cmd->add_option("--ny", c.ny, "Cells in y")->check(CLI::Range(2, 100000));
  tables_cmd->add_option("--cfl", c.cfl, "CFL number")->check(CLI::Range(0.0, 1.0));
  tables_cmd->add_option("--probe-steps", out.probe_steps, "Steps per time-step-table run")
      ->check(CLI::PositiveNumber);
  tables_cmd->add_flag("--full", out.full, "Run the time-step table to t_final");

  app.add_subcommand("check", "Run the fast property suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    out.help = target->help();
    return out;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  out.subcommand = app.get_subcommands().front()->get_name();
  c.scheme = parse_scheme(scheme);
  c.mode = parse_mode(mode);
  c.case_kind = parse_case(data);
  if (out.subcommand == "run") {
    try {
      c.validate();
    } catch (const InvalidConfigError& e) {
      throw UsageError(e.what());
    }
    c = c.normalized();
  }
  return out;
}

/// Parses rendered config text as a `run` invocation would.
inline RunConfig parse_config_text(const std::string& text) {
  std::vector<std::string> args{"run"};
  for (const auto& [key, value] : read_config_text(text)) {
    args.push_back("--" + key);
    args.push_back(value);
  }
  return parse(args).run;
}

inline void print_metrics(std::ostream& os, const RunReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%s %s eps=%g t=%g steps=%ld\n  n %.3e %%  nu_x %.3e %%  nu_y %.3e %%  nu_z %.3e\n",
                scheme_name(r.config.scheme), mode_name(r.config.mode), r.config.epsilon, r.t_end,
                r.steps, r.metrics.n, r.metrics.mx, r.metrics.my, r.metrics.mz);
  os << buf;
  if (r.diverged) os << "  diverged: " << r.divergence << '\n';
  if (r.truncated) os << "  stopped at the step limit\n";
}

/// Exit status of a finished run: divergence only fails the command in strict mode.
inline int run_exit_code(const RunReport& r, bool strict) { return r.diverged && strict ? 1 : 0; }

inline int execute(const CliArgs& a, std::ostream& os, std::ostream& err) {
  if (a.subcommand == "check") {
    int status = 0;
    for (const auto& r : run_property_suite()) {
      os << (r.ok ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      if (!r.ok && status == 0) {
        err << "first failing property: " << r.name << '\n';
        status = 1;
      }
    }
    return status;
  }
  if (a.subcommand == "tables") {
    TableOptions o;
    o.nx = a.run.nx;
    o.ny = a.run.ny;
    o.cfl = a.run.cfl;
    o.dt_probe_steps = a.full ? 0 : a.probe_steps;
    o.workers = worker_count();
    std::vector<Table> all;
    const std::vector<std::string> names =
        a.preset == "all" ? table_presets() : std::vector<std::string>{a.preset};
    for (const auto& name : names) {
      for (auto& t : reproduce_tables(name, o)) {
        os << t.markdown() << '\n';
        all.push_back(std::move(t));
      }
    }
    write_tables(all, a.out);
    return 0;
  }
  const RunConfig& c = a.run;
  std::filesystem::create_directories(c.out_dir);
  write_text(std::filesystem::path(c.out_dir) / "config_resolved.txt", render_config(c));
  const RunReport r = run(c);
  write_run_outputs(r, c.out_dir);
  print_metrics(os, r);
  return run_exit_code(r, a.strict);
}

/// Whole command: parse, execute, map failures to exit codes.
inline int main_entry(int argc, char** argv, std::ostream& os = std::cout,
                      std::ostream& err = std::cerr) {
  tune_allocator();
  std::vector<std::string> args(argv + 1, argv + argc);
  CliArgs a;
  try {
    a = parse(args);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return 2;
  }
  if (!a.help.empty()) {
    os << a.help;
    return 0;
  }
  try {
    return execute(a, os, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace driftap::cli
