#pragma once

// Subcommands of the command-line front end. Each returns a process exit code:
//   solve   0 converged, 1 not converged, 2 hypothesis fail (unless forced)
//   check   0 no fail, 1 some fail
//   fiber   0 single sign change, 1 otherwise
//   oracle  0 profile found, 1 shooting failed
//   any     64 bad configuration, 73 output not writable

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "nehari/check_report.hpp"
#include "nehari/config.hpp"
#include "nehari/field_io.hpp"
#include "nehari/fiber.hpp"
#include "nehari/solver.hpp"
#include "nehari/verify.hpp"

namespace nehari {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitHypothesis = 2;
inline constexpr int kExitConfig = 64;
inline constexpr int kExitWrite = 73;

struct CliFlags {
  bool force = false;
  std::optional<std::uint64_t> seed;  // replaces solver.seed and fiber.seed
  std::optional<std::string> out;     // replaces output.directory
};

namespace cli {

class WriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void apply_flags(RunConfig& cfg, const CliFlags& flags) {
  if (flags.seed) {
    cfg.solver.options.seed = *flags.seed;
    cfg.fiber.seed = *flags.seed;
  }
  if (flags.out) cfg.output.directory = *flags.out;
}

inline std::filesystem::path artifact(const RunConfig& cfg, const std::string& suffix) {
  return std::filesystem::path(cfg.output.directory) / (cfg.output.prefix + suffix);
}

/// Creates the output directory on demand; any failure becomes a WriteError.
inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw WriteError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw WriteError("write to " + path.string() + " failed");
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline void write_meta(const RunConfig& cfg, const std::string& command) {
  nlohmann::ordered_json meta;
  meta["command"] = command;
  meta["timestamp"] = utc_timestamp();
  meta["seed"] = cfg.solver.options.seed;
  write_text(artifact(cfg, "_meta.json"), meta.dump(2) + "\n");
}

}  // namespace cli

/// Arithmetic and sampled checks of the configured family's hypotheses.
inline CheckReport check_family(const RunConfig& cfg) {
  const Nonlinearity f = make_nonlinearity(cfg);
  const double alpha = growth_exponent(cfg);
  const auto& fc = cfg.functional;
  if (fc.family == "quasilinear") {
    const auto op = std::get<QuasilinearOperator>(make_operator(cfg));
    return check_quasilinear(op, alpha, f, cfg.domain.dim);
  }
  if (fc.family == "kirchhoff") return check_kirchhoff(make_kirchhoff_coefficient(cfg), alpha, f);
  return check_anisotropic(fc.pvec, alpha, f, cfg.domain.dim);
}

inline CheckReport run_all_checks(const RunConfig& cfg, const Functional& F) {
  CheckReport report = check_family(cfg);
  AbstractCheckOptions opt;
  opt.seed = cfg.check.seed;
  report.merge(check_abstract(F, cfg.check.directions, opt));
  return report;
}

inline void print_check_table(const CheckReport& report, std::ostream& out) {
  for (const auto& e : report.entries()) {
    out << std::left << std::setw(14) << e.id << std::setw(15) << to_string(e.status);
    if (e.witness) out << "witness: " << *e.witness << "  ";
    out << e.notes << '\n';
  }
}

inline nlohmann::ordered_json report_json(const SolveReport& r) {
  nlohmann::ordered_json j;
  j["c"] = r.c_value;
  j["residual"] = r.final_residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["status"] = r.status;
  j["seed"] = r.seed;
  j["spread"] = r.spread;
  j["n_converged"] = r.n_converged;
  j["min_negative_part"] = r.min_negative_part;
  j["t_history"] = r.t_history;
  j["energy_history"] = r.energy_history;
  j["hypothesis_summary"] = r.hypothesis_summary.to_json();
  return j;
}

inline int run_solve(RunConfig cfg, const CliFlags& flags, std::ostream& out, std::ostream& err) {
  cli::apply_flags(cfg, flags);
  const Grid grid = make_grid(cfg);
  const Functional F = make_functional(cfg, grid);
  const SolveOptions opts = make_solve_options(cfg, grid);

  const CheckReport checks = run_all_checks(cfg, F);
  if (checks.any_fail()) {
    for (const auto& e : checks.entries()) {
      if (e.status != CheckStatus::fail) continue;
      err << "verify: " << e.id << " fail, witness: " << e.witness.value_or("") << " (" << e.notes << ")\n";
    }
    if (!flags.force) {
      err << "aborting: hypothesis check failed (use --force to solve anyway)\n";
      return kExitHypothesis;
    }
  }

  std::optional<SolveReport> result;
  try {
    result = multi_start(F, cfg.solver.starts, opts.seed, opts);
  } catch (const MultiStartFailure& e) {
    err << "solve: " << e.what() << '\n';
    if (!e.best()) return kExitFail;
    result = *e.best();
  }
  SolveReport& r = *result;
  CheckReport summary = checks;
  summary.merge(r.hypothesis_summary);
  r.hypothesis_summary = summary;

  std::ostringstream state;
  write_field_csv(state, r.ground_state);
  cli::write_text(cli::artifact(cfg, "_state.csv"), state.str());
  cli::write_text(cli::artifact(cfg, "_report.json"), report_json(r).dump(2) + "\n");
  cli::write_meta(cfg, "solve");

  out << "status " << r.status << "  c = " << detail::format_g17(r.c_value) << "  residual = "
      << detail::format_double(r.final_residual) << "  iterations = " << r.iterations << "  seed = " << r.seed
      << '\n';
  return r.converged ? kExitOk : kExitFail;
}

inline int run_check(RunConfig cfg, const CliFlags& flags, std::ostream& out, std::ostream&) {
  cli::apply_flags(cfg, flags);
  const Grid grid = make_grid(cfg);
  const Functional F = make_functional(cfg, grid);
  const CheckReport report = run_all_checks(cfg, F);
  print_check_table(report, out);
  cli::write_text(cli::artifact(cfg, "_check.json"), report.to_json().dump(2) + "\n");
  cli::write_meta(cfg, "check");
  return report.any_fail() ? kExitFail : kExitOk;
}

inline int run_fiber(RunConfig cfg, const CliFlags& flags, std::ostream& out, std::ostream& err) {
  cli::apply_flags(cfg, flags);
  const Grid grid = make_grid(cfg);
  const Functional F = make_functional(cfg, grid);
  Field u = random_init(grid, cfg.fiber.seed, cfg.fiber.modes, cfg.fiber.nonnegative);
  detail::apply_mask(u, make_mask(cfg, grid));
  const RayProfile ray = F.ray(u);

  ScanSpec scan = cfg.fiber.scan;
  std::optional<double> tu;
  try {
    ProjectionOptions popt;
    popt.scan_points = 0;
    tu = project_ray(ray, F.homogeneity_exponent(), popt).t;
  } catch (const HypothesisViolation& e) {
    err << "fiber: " << e.what() << '\n';
    if (scan.relative) return kExitFail;
  }
  if (scan.relative) {
    scan.lo *= *tu;
    scan.hi *= *tu;
    scan.relative = false;
  }
  std::ostringstream csv;
  csv << "t,gamma,slope\n";
  std::vector<double> slopes;
  for (double t : scan.grid()) {
    const double g = ray.slope(t);
    slopes.push_back(g);
    csv << detail::format_g17(t) << ',' << detail::format_g17(ray.value(t)) << ',' << detail::format_g17(g) << '\n';
  }
  cli::write_text(cli::artifact(cfg, "_fiber.csv"), csv.str());
  cli::write_meta(cfg, "fiber");
  const int changes = detail::count_sign_changes(slopes);
  if (tu) out << "t_u = " << detail::format_g17(*tu) << "  ";
  out << "sign changes = " << changes << '\n';
  return changes == 1 ? kExitOk : kExitFail;
}

inline int run_oracle(RunConfig cfg, const CliFlags& flags, std::ostream& out, std::ostream& err) {
  cli::apply_flags(cfg, flags);
  const Nonlinearity f = make_nonlinearity(cfg);
  const int d = cfg.oracle.d.value_or(cfg.domain.dim);
  std::optional<RadialProfile> prof;
  try {
    prof = radial_shooting(f, d, cfg.oracle.R, cfg.oracle.tol, cfg.oracle.steps);
  } catch (const OracleFailure& e) {
    err << "oracle: " << e.what() << '\n';
    return kExitFail;
  }
  std::ostringstream csv;
  csv << "r,u\n";
  for (std::size_t k = 0; k < prof->r().size(); ++k) {
    csv << detail::format_g17(prof->r()[k]) << ',' << detail::format_g17(prof->u()[k]) << '\n';
  }
  cli::write_text(cli::artifact(cfg, "_radial.csv"), csv.str());
  cli::write_meta(cfg, "oracle");
  out << "energy = " << detail::format_g17(prof->energy()) << "  u(0) = " << detail::format_g17(prof->u().front())
      << '\n';
  return kExitOk;
}

/// Loads the config and runs one subcommand, mapping errors to exit codes.
inline int run_command(const std::string& command, const std::string& config_path, const CliFlags& flags,
                       std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(config_path);
    if (command == "solve") return run_solve(cfg, flags, out, err);
    if (command == "check") return run_check(cfg, flags, out, err);
    if (command == "fiber") return run_fiber(cfg, flags, out, err);
    if (command == "oracle") return run_oracle(cfg, flags, out, err);
    err << "unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const cli::WriteError& e) {
    err << "error: " << e.what() << '\n';
    return kExitWrite;
  } catch (const ConfigurationError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const HypothesisViolation& e) {
    err << "hypothesis violation: " << e.what() << '\n';
    return kExitHypothesis;
  } catch (const DegenerateDirectionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace nehari
