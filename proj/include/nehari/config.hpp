#pragma once

// Run configuration: flat key=value text, optionally grouped under [section]
// headers that prefix the keys (`[domain]` + `dim = 2` is `domain.dim = 2`).
// Comments start with # or ;.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/fiber.hpp"
#include "nehari/functional.hpp"
#include "nehari/solver.hpp"

namespace nehari {

struct DomainConfig {
  int dim = 2;
  std::vector<double> extents;  // broadcast when one value is given; default 1
  std::vector<int> resolution;  // broadcast when one value is given; default 64
  std::string mask = "none";    // none | ball
  std::optional<double> ball_radius;
  std::vector<double> ball_center;
};

struct FunctionalConfig {
  std::string family = "quasilinear";
  double p = 2.0;
  std::optional<double> q;
  std::string a = "one";  // one | p_plus_q
  std::string M = "affine";
  std::vector<double> M_params;  // affine: slope, intercept; log: m0; power_sum: m0, b1, g1, ...
  std::vector<double> pvec;
  std::vector<double> f_exponents{4.0};
  std::vector<double> f_coefficients{1.0};
  std::optional<double> alpha;  // growth exponent; defaults to the largest f exponent
};

struct SolverConfig {
  SolveOptions options;
  int starts = 1;
};

struct CheckConfig {
  int directions = 20;
  std::uint64_t seed = 20240;
};

struct FiberConfig {
  std::uint64_t seed = 7;
  int modes = 2;
  bool nonnegative = true;
  ScanSpec scan{1e-3, 1e3, 200, true};
};

struct OracleConfig {
  std::optional<int> d;  // defaults to domain.dim
  double R = 1.0;
  double tol = 1e-10;
  int steps = 8000;
};

struct OutputConfig {
  std::string directory = ".";
  std::string prefix = "nehari";
};

struct RunConfig {
  DomainConfig domain;
  FunctionalConfig functional;
  SolverConfig solver;
  CheckConfig check;
  FiberConfig fiber;
  OracleConfig oracle;
  OutputConfig output;
  std::map<std::string, int> key_lines;  // where each key was set, for diagnostics

  std::string where(const std::string& key) const {
    auto it = key_lines.find(key);
    return it == key_lines.end() ? "key '" + key + "'" : "line " + std::to_string(it->second) + ", key '" + key + "'";
  }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

struct ValueError {
  std::string reason;
};

template <class T>
T parse_number(const std::string& text) {
  const std::string s = trim(text);
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) throw ValueError{"not a number: '" + s + "'"};
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw ValueError{"not finite: '" + s + "'"};
  }
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(item));
  if (out.empty()) throw ValueError{"empty list"};
  return out;
}

inline bool parse_bool(const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ValueError{"not a boolean: '" + s + "'"};
}

inline std::string parse_choice(const std::string& text, std::initializer_list<const char*> allowed) {
  const std::string s = trim(text);
  std::string list;
  for (const char* a : allowed) {
    if (s == a) return s;
    list += list.empty() ? a : std::string("|") + a;
  }
  throw ValueError{"expected one of " + list + ", got '" + s + "'"};
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

inline const std::map<std::string, Setter>& config_keys() {
  static const std::map<std::string, Setter> keys = [] {
    std::map<std::string, Setter> k;
    k["domain.dim"] = [](RunConfig& c, const std::string& v) { c.domain.dim = parse_number<int>(v); };
    k["domain.extents"] = [](RunConfig& c, const std::string& v) { c.domain.extents = parse_list<double>(v); };
    k["domain.resolution"] = [](RunConfig& c, const std::string& v) { c.domain.resolution = parse_list<int>(v); };
    k["domain.mask"] = [](RunConfig& c, const std::string& v) { c.domain.mask = parse_choice(v, {"none", "ball"}); };
    k["domain.ball_radius"] = [](RunConfig& c, const std::string& v) { c.domain.ball_radius = parse_number<double>(v); };
    k["domain.ball_center"] = [](RunConfig& c, const std::string& v) { c.domain.ball_center = parse_list<double>(v); };

    k["functional.family"] = [](RunConfig& c, const std::string& v) {
      c.functional.family = parse_choice(v, {"quasilinear", "kirchhoff", "anisotropic"});
    };
    k["functional.p"] = [](RunConfig& c, const std::string& v) { c.functional.p = parse_number<double>(v); };
    k["functional.q"] = [](RunConfig& c, const std::string& v) { c.functional.q = parse_number<double>(v); };
    k["functional.a"] = [](RunConfig& c, const std::string& v) { c.functional.a = parse_choice(v, {"one", "p_plus_q"}); };
    k["functional.M"] = [](RunConfig& c, const std::string& v) {
      c.functional.M = parse_choice(v, {"affine", "log", "power_sum"});
    };
    k["functional.M_params"] = [](RunConfig& c, const std::string& v) { c.functional.M_params = parse_list<double>(v); };
    k["functional.pvec"] = [](RunConfig& c, const std::string& v) { c.functional.pvec = parse_list<double>(v); };
    k["functional.f_exponents"] = [](RunConfig& c, const std::string& v) {
      c.functional.f_exponents = parse_list<double>(v);
    };
    k["functional.f_coefficients"] = [](RunConfig& c, const std::string& v) {
      c.functional.f_coefficients = parse_list<double>(v);
    };
    k["functional.alpha"] = [](RunConfig& c, const std::string& v) { c.functional.alpha = parse_number<double>(v); };

    k["solver.max_iterations"] = [](RunConfig& c, const std::string& v) {
      c.solver.options.max_iterations = parse_number<int>(v);
    };
    k["solver.residual_tolerance"] = [](RunConfig& c, const std::string& v) {
      c.solver.options.residual_tolerance = parse_number<double>(v);
    };
    k["solver.projection_tolerance"] = [](RunConfig& c, const std::string& v) {
      c.solver.options.projection_tolerance = parse_number<double>(v);
    };
    k["solver.armijo.initial_step"] = [](RunConfig& c, const std::string& v) {
      c.solver.options.armijo.initial_step = parse_number<double>(v);
    };
    k["solver.armijo.shrink"] = [](RunConfig& c, const std::string& v) {
      c.solver.options.armijo.shrink = parse_number<double>(v);
    };
    k["solver.armijo.slope_fraction"] = [](RunConfig& c, const std::string& v) {
      c.solver.options.armijo.slope_fraction = parse_number<double>(v);
    };
    k["solver.armijo.max_backtracks"] = [](RunConfig& c, const std::string& v) {
      c.solver.options.armijo.max_backtracks = parse_number<int>(v);
    };
    k["solver.preconditioner"] = [](RunConfig& c, const std::string& v) {
      c.solver.options.preconditioner = parse_choice(v, {"none", "inverse_laplacian"}) == "none"
                                            ? PreconditionerKind::none
                                            : PreconditionerKind::inverse_laplacian;
    };
    k["solver.seed"] = [](RunConfig& c, const std::string& v) { c.solver.options.seed = parse_number<std::uint64_t>(v); };
    k["solver.nonnegative_start"] = [](RunConfig& c, const std::string& v) {
      c.solver.options.nonnegative_start = parse_bool(v);
    };
    k["solver.modes"] = [](RunConfig& c, const std::string& v) { c.solver.options.modes = parse_number<int>(v); };
    k["solver.starts"] = [](RunConfig& c, const std::string& v) { c.solver.starts = parse_number<int>(v); };

    k["check.directions"] = [](RunConfig& c, const std::string& v) { c.check.directions = parse_number<int>(v); };
    k["check.seed"] = [](RunConfig& c, const std::string& v) { c.check.seed = parse_number<std::uint64_t>(v); };

    k["fiber.seed"] = [](RunConfig& c, const std::string& v) { c.fiber.seed = parse_number<std::uint64_t>(v); };
    k["fiber.modes"] = [](RunConfig& c, const std::string& v) { c.fiber.modes = parse_number<int>(v); };
    k["fiber.nonnegative"] = [](RunConfig& c, const std::string& v) { c.fiber.nonnegative = parse_bool(v); };
    k["fiber.lo"] = [](RunConfig& c, const std::string& v) { c.fiber.scan.lo = parse_number<double>(v); };
    k["fiber.hi"] = [](RunConfig& c, const std::string& v) { c.fiber.scan.hi = parse_number<double>(v); };
    k["fiber.points"] = [](RunConfig& c, const std::string& v) { c.fiber.scan.points = parse_number<int>(v); };
    k["fiber.relative"] = [](RunConfig& c, const std::string& v) { c.fiber.scan.relative = parse_bool(v); };

    k["oracle.d"] = [](RunConfig& c, const std::string& v) { c.oracle.d = parse_number<int>(v); };
    k["oracle.R"] = [](RunConfig& c, const std::string& v) { c.oracle.R = parse_number<double>(v); };
    k["oracle.tol"] = [](RunConfig& c, const std::string& v) { c.oracle.tol = parse_number<double>(v); };
    k["oracle.steps"] = [](RunConfig& c, const std::string& v) { c.oracle.steps = parse_number<int>(v); };

    k["output.directory"] = [](RunConfig& c, const std::string& v) { c.output.directory = trim(v); };
    k["output.prefix"] = [](RunConfig& c, const std::string& v) { c.output.prefix = trim(v); };
    return k;
  }();
  return keys;
}

}  // namespace detail

/// Throws ConfigurationError naming the line and key of the first problem.
inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  std::string section;
  int line_no = 0;
  const auto fail = [&](const std::string& msg) {
    throw ConfigurationError("config line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail("empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value, got '" + line + "'");
    std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) fail("missing key before '='");
    if (!section.empty()) key = section + "." + key;
    const auto& keys = detail::config_keys();
    const auto it = keys.find(key);
    if (it == keys.end()) fail("unknown key '" + key + "'");
    if (cfg.key_lines.count(key)) {
      fail("key '" + key + "' already set on line " + std::to_string(cfg.key_lines[key]));
    }
    if (value.empty()) fail("key '" + key + "' has no value");
    try {
      it->second(cfg, value);
    } catch (const detail::ValueError& e) {
      fail("key '" + key + "': " + e.reason);
    }
    cfg.key_lines[key] = line_no;
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  return parse_config(in);
}

inline Grid make_grid(const RunConfig& c) {
  const int d = c.domain.dim;
  if (d < 1 || d > 3) throw ConfigurationError(c.where("domain.dim") + ": dimension must be 1, 2 or 3");
  auto broadcast = [&](auto values, auto fallback, const char* key) {
    using V = typename decltype(values)::value_type;
    if (values.empty()) values.assign(d, static_cast<V>(fallback));
    if (values.size() == 1) values.assign(d, values.front());
    if (static_cast<int>(values.size()) != d) {
      throw ConfigurationError(c.where(key) + ": expected 1 or " + std::to_string(d) + " values");
    }
    return values;
  };
  const auto ext = broadcast(c.domain.extents, 1.0, "domain.extents");
  const auto res = broadcast(c.domain.resolution, 64, "domain.resolution");
  return build_grid(d, ext, res);
}

/// Empty unless domain.mask = ball; the default ball is centred in the box and touches its nearest face.
inline std::vector<std::uint8_t> make_mask(const RunConfig& c, const Grid& g) {
  if (c.domain.mask != "ball") return {};
  std::array<double, 3> center{};
  double half_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.dim(); ++i) {
    center[i] = 0.5 * g.extent(i);
    half_min = std::min(half_min, 0.5 * g.extent(i));
  }
  if (!c.domain.ball_center.empty()) {
    if (static_cast<int>(c.domain.ball_center.size()) != g.dim()) {
      throw ConfigurationError(c.where("domain.ball_center") + ": expected " + std::to_string(g.dim()) + " values");
    }
    for (int i = 0; i < g.dim(); ++i) center[i] = c.domain.ball_center[i];
  }
  const double radius = c.domain.ball_radius.value_or(half_min);
  if (!(radius > 0.0)) throw ConfigurationError(c.where("domain.ball_radius") + ": radius must be positive");
  auto mask = ball_mask(g, center, radius);
  if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
    throw ConfigurationError(c.where("domain.ball_radius") + ": ball contains no grid node");
  }
  return mask;
}

inline Nonlinearity make_nonlinearity(const RunConfig& c) {
  const auto& ex = c.functional.f_exponents;
  const auto& co = c.functional.f_coefficients;
  if (ex.size() != co.size()) {
    throw ConfigurationError(c.where("functional.f_coefficients") + ": " + std::to_string(co.size()) +
                             " coefficients for " + std::to_string(ex.size()) + " exponents");
  }
  std::vector<PowerTerm> terms;
  for (std::size_t k = 0; k < ex.size(); ++k) {
    if (!(ex[k] > 1.0)) throw ConfigurationError(c.where("functional.f_exponents") + ": exponents must exceed 1");
    terms.push_back({co[k], ex[k]});
  }
  const bool signed_terms = std::any_of(co.begin(), co.end(), [](double v) { return v < 0.0; });
  if (signed_terms) return Nonlinearity::signed_sum(std::move(terms));
  if (terms.size() == 1) return Nonlinearity::pure_power(terms[0].exponent, terms[0].coefficient);
  return Nonlinearity::sum_of_powers(std::move(terms));
}

inline double growth_exponent(const RunConfig& c) {
  if (c.functional.alpha) return *c.functional.alpha;
  return *std::max_element(c.functional.f_exponents.begin(), c.functional.f_exponents.end());
}

inline KirchhoffCoefficient make_kirchhoff_coefficient(const RunConfig& c) {
  const auto& m = c.functional.M;
  const auto& v = c.functional.M_params;
  const auto bad = [&](const std::string& what) {
    return ConfigurationError(c.where("functional.M_params") + ": " + what);
  };
  if (m == "affine") {
    if (v.empty()) return KirchhoffCoefficient::affine(1.0, 1.0);
    if (v.size() != 2) throw bad("affine M takes slope, intercept");
    return KirchhoffCoefficient::affine(v[0], v[1]);
  }
  if (m == "log") {
    if (v.empty()) return KirchhoffCoefficient::logarithmic(1.0);
    if (v.size() != 1) throw bad("log M takes m0");
    return KirchhoffCoefficient::logarithmic(v[0]);
  }
  if (v.empty()) return KirchhoffCoefficient::power_sum(1.0, {{1.0, 0.5}});
  if (v.size() % 2 != 1) throw bad("power_sum M takes m0 followed by (b, gamma) pairs");
  std::vector<std::pair<double, double>> terms;
  for (std::size_t k = 1; k + 1 < v.size(); k += 2) terms.emplace_back(v[k], v[k + 1]);
  return KirchhoffCoefficient::power_sum(v[0], std::move(terms));
}

inline Functional::Operator make_operator(const RunConfig& c) {
  const auto& fc = c.functional;
  if (fc.family == "quasilinear") {
    if (fc.a == "p_plus_q") {
      if (!fc.q) throw ConfigurationError(c.where("functional.a") + ": a = p_plus_q needs functional.q");
      return QuasilinearOperator::p_plus_q(fc.p, *fc.q);
    }
    return QuasilinearOperator::constant_one(fc.p, fc.q);
  }
  if (fc.family == "kirchhoff") return KirchhoffOperator{make_kirchhoff_coefficient(c)};
  if (fc.pvec.empty()) throw ConfigurationError("anisotropic family needs functional.pvec");
  return AnisotropicOperator(fc.pvec);
}

inline Functional make_functional(const RunConfig& c, const Grid& g) {
  return Functional(g, make_operator(c), make_nonlinearity(c));
}

/// Solver options with the free mask filled in from the domain block.
inline SolveOptions make_solve_options(const RunConfig& c, const Grid& g) {
  SolveOptions o = c.solver.options;
  o.free_mask = make_mask(c, g);
  o.validate();
  if (c.solver.starts < 1) throw ConfigurationError(c.where("solver.starts") + ": must be >= 1");
  return o;
}

}  // namespace nehari
