#pragma once

// JSON-configured scenarios: parsing with key-path diagnostics, CLI
// overrides, and the runner that writes CSV/JSON artifacts.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "riesz/analysis.hpp"
#include "riesz/errors.hpp"
#include "riesz/geometry.hpp"
#include "riesz/io.hpp"
#include "riesz/kernel.hpp"
#include "riesz/measures.hpp"
#include "riesz/solvers.hpp"

namespace riesz::scenario {

using nlohmann::json;

/// Validation failure tied to the offending key, e.g. `kernel.alpha`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Kind { pseudo_balayage, gauss_variational, capacitary, sweep, thinness, kelvin_check, balayage_check };

inline const std::vector<std::pair<std::string, Kind>>& kind_names() {
  static const std::vector<std::pair<std::string, Kind>> names = {
      {"pseudo_balayage", Kind::pseudo_balayage}, {"gauss_variational", Kind::gauss_variational},
      {"capacitary", Kind::capacitary},           {"sweep", Kind::sweep},
      {"thinness", Kind::thinness},               {"kelvin_check", Kind::kelvin_check},
      {"balayage_check", Kind::balayage_check}};
  return names;
}

struct Atom {
  Eigen::VectorXd at;
  double mass = 0.0;
};

struct FieldSpec {
  std::vector<Atom> atoms;  // empty for "none"
  bool normalize_by_cone_mass = false;
};

struct OutputSpec {
  std::optional<std::string> directory;
  bool csv = true;
  bool json = true;
};

struct ScenarioConfig {
  Kind kind = Kind::pseudo_balayage;
  json geometry;  // validated generator block
  FieldSpec field;
  KernelContext kernel{2.0, 3, kDefaultRegFactor};
  SolverConfig solver;
  OutputSpec output;
  SweepOptions sweep;
  double thinness_q = 2.0;
  Eigen::VectorXd kelvin_center;
  int kelvin_samples = 100;
  double kelvin_sample_radius = 1.3;
  double balayage_tol = 0.02;
  std::filesystem::path base_dir;  // for relative CSV paths
};

struct Overrides {
  std::optional<double> alpha;
  std::optional<int> dim;
  std::optional<int> nodes;
  std::optional<double> reg_factor;
};

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path + key, "required key is missing");
  return obj.at(key);
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

inline double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) throw ConfigError(path, "must be positive");
  return x;
}

inline int integer(const json& v, const std::string& path, int min_value) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < min_value || x > 100000000) {
    throw ConfigError(path, "must be an integer >= " + std::to_string(min_value));
  }
  return static_cast<int>(x);
}

inline double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) {
  return obj.contains(key) ? number(obj.at(key), path + key) : fallback;
}

inline Eigen::VectorXd vector_of(const json& v, const std::string& path, int dim) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of " + std::to_string(dim) + " numbers");
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError(path, "has " + std::to_string(v.size()) + " coordinates, kernel.dim is " + std::to_string(dim));
  }
  Eigen::VectorXd out(dim);
  for (int d = 0; d < dim; ++d) out[d] = number(v.at(static_cast<std::size_t>(d)), path + "[" + std::to_string(d) + "]");
  return out;
}

inline void only_keys(const json& obj, const std::string& path, const std::vector<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError(path + it.key(), "unknown key");
    }
  }
}

inline const json& object_at(const json& root, const std::string& key, const std::string& path) {
  const json& v = require(root, key, path);
  if (!v.is_object()) throw ConfigError(path + key, "expected an object");
  return v;
}

inline KernelContext parse_kernel(const json& k) {
  only_keys(k, "kernel.", {"alpha", "dim", "reg_factor"});
  const int dim = integer(require(k, "dim", "kernel."), "kernel.dim", 2);
  if (dim != 2 && dim != 3) throw ConfigError("kernel.dim", "only dimensions 2 and 3 are supported");
  const double alpha = number(require(k, "alpha", "kernel."), "kernel.alpha");
  if (!(alpha > 0.0 && alpha < dim)) {
    throw ConfigError("kernel.alpha", "must satisfy 0 < alpha < dim = " + std::to_string(dim));
  }
  const double reg = k.contains("reg_factor") ? positive(k.at("reg_factor"), "kernel.reg_factor") : kDefaultRegFactor;
  return KernelContext(alpha, dim, reg);
}

inline SolverConfig parse_solver(const json& root) {
  SolverConfig cfg;
  if (!root.contains("solver")) return cfg;
  const json& s = object_at(root, "solver", "");
  only_keys(s, "solver.", {"max_iters", "kkt_tol", "step_rule"});
  if (s.contains("max_iters")) cfg.max_iters = integer(s.at("max_iters"), "solver.max_iters", 1);
  if (s.contains("kkt_tol")) cfg.kkt_tol = positive(s.at("kkt_tol"), "solver.kkt_tol");
  if (s.contains("step_rule")) {
    const json& r = s.at("step_rule");
    if (r == "fixed_inverse_lipschitz") {
      cfg.step_rule = StepRule::fixed_inverse_lipschitz;
    } else if (r == "adaptive_bb_with_monotone_fallback") {
      cfg.step_rule = StepRule::adaptive_bb_with_monotone_fallback;
    } else {
      throw ConfigError("solver.step_rule",
                        "must be fixed_inverse_lipschitz or adaptive_bb_with_monotone_fallback");
    }
  }
  return cfg;
}

inline FieldSpec parse_field(const json& root, int dim) {
  FieldSpec f;
  const json& v = require(root, "field", "");
  if (v == "none") return f;
  if (!v.is_object()) throw ConfigError("field", "expected \"none\" or an object with atoms");
  only_keys(v, "field.", {"atoms", "normalize"});
  const json& atoms = require(v, "atoms", "field.");
  if (!atoms.is_array()) throw ConfigError("field.atoms", "expected an array");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string p = "field.atoms[" + std::to_string(i) + "].";
    const json& a = atoms.at(i);
    if (!a.is_object()) throw ConfigError(p.substr(0, p.size() - 1), "expected an object");
    only_keys(a, p, {"at", "mass"});
    f.atoms.push_back({vector_of(require(a, "at", p), p + "at", dim), number(require(a, "mass", p), p + "mass")});
  }
  if (v.contains("normalize")) {
    const json& n = v.at("normalize");
    if (n == "cone_mass") {
      f.normalize_by_cone_mass = true;
    } else if (n != "none") {
      throw ConfigError("field.normalize", "must be none or cone_mass");
    }
  }
  return f;
}

inline const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names = {"sphere",  "ball",     "truncated_complement", "truncation_family",
                                                 "ball_ray", "inverted_ball", "csv"};
  return names;
}

inline void check_geometry(const json& g, int dim, Kind kind) {
  const json& gen = require(g, "generator", "geometry.");
  if (!gen.is_string()) throw ConfigError("geometry.generator", "expected a string");
  const std::string name = gen.get<std::string>();
  const std::string p = "geometry.";
  auto count_key = [&](const char* key) { integer(require(g, key, p), p + key, 2); };
  if (name == "sphere" || name == "ball") {
    only_keys(g, p, {"generator", "center", "radius", "count"});
    if (g.contains("center")) vector_of(g.at("center"), p + "center", dim);
    if (g.contains("radius")) positive(g.at("radius"), p + "radius");
    count_key("count");
  } else if (name == "inverted_ball") {
    only_keys(g, p, {"generator", "center", "radius", "count", "inversion_center"});
    if (g.contains("center")) vector_of(g.at("center"), p + "center", dim);
    if (g.contains("radius")) positive(g.at("radius"), p + "radius");
    vector_of(require(g, "inversion_center", p), p + "inversion_center", dim);
    count_key("count");
  } else if (name == "truncated_complement") {
    only_keys(g, p, {"generator", "inner_radius", "outer_radius", "shells", "count", "shell_ratio"});
    const double inner = positive(require(g, "inner_radius", p), p + "inner_radius");
    if (g.contains("outer_radius") == g.contains("shells")) {
      throw ConfigError(p + "outer_radius", "give exactly one of outer_radius and shells");
    }
    if (g.contains("outer_radius") && !(positive(g.at("outer_radius"), p + "outer_radius") > inner)) {
      throw ConfigError(p + "outer_radius", "must exceed inner_radius");
    }
    if (g.contains("shells")) integer(g.at("shells"), p + "shells", 2);
    if (g.contains("shell_ratio") && !(number(g.at("shell_ratio"), p + "shell_ratio") > 1.0)) {
      throw ConfigError(p + "shell_ratio", "must exceed 1");
    }
    count_key("count");
  } else if (name == "truncation_family") {
    if (kind != Kind::sweep) throw ConfigError("geometry.generator", "truncation_family is only valid for kind sweep");
    only_keys(g, p, {"generator", "inner_radius", "outer_radii", "nodes_per_shell", "shell_ratio"});
    const double inner = positive(require(g, "inner_radius", p), p + "inner_radius");
    const json& radii = require(g, "outer_radii", p);
    if (!radii.is_array() || radii.size() < 3) throw ConfigError(p + "outer_radii", "expected at least 3 radii");
    double prev = inner;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const std::string rp = p + "outer_radii[" + std::to_string(i) + "]";
      const double r = number(radii.at(i), rp);
      if (!(r > prev)) throw ConfigError(rp, "radii must increase and exceed inner_radius");
      prev = r;
    }
    count_key("nodes_per_shell");
    if (g.contains("shell_ratio") && !(number(g.at("shell_ratio"), p + "shell_ratio") > 1.0)) {
      throw ConfigError(p + "shell_ratio", "must exceed 1");
    }
  } else if (name == "ball_ray") {
    only_keys(g, p, {"generator", "q", "balls", "ball_radius", "count_per_ball"});
    if (!(number(require(g, "q", p), p + "q") > 1.0)) throw ConfigError(p + "q", "must exceed 1");
    integer(require(g, "balls", p), p + "balls", 1);
    positive(require(g, "ball_radius", p), p + "ball_radius");
    count_key("count_per_ball");
  } else if (name == "csv") {
    only_keys(g, p, {"generator", "path"});
    if (!require(g, "path", p).is_string()) throw ConfigError(p + "path", "expected a string");
  } else {
    throw ConfigError("geometry.generator", "unknown generator '" + name + "'");
  }
  if (kind == Kind::sweep && name != "truncation_family") {
    throw ConfigError("geometry.generator", "kind sweep needs the truncation_family generator");
  }
}

inline Point center_of(const json& g, const char* key, int dim) {
  return g.contains(key) ? Point(vector_of(g.at(key), std::string("geometry.") + key, dim)) : Point::origin(dim);
}

}  // namespace detail

inline Kind parse_kind(const json& v) {
  if (!v.is_string()) throw ConfigError("kind", "expected a string");
  for (const auto& [name, kind] : kind_names()) {
    if (v == name) return kind;
  }
  throw ConfigError("kind", "unknown kind '" + v.get<std::string>() + "'");
}

inline std::string kind_name(Kind k) {
  for (const auto& [name, kind] : kind_names()) {
    if (kind == k) return name;
  }
  return "unknown";
}

/// Writes command-line overrides into the raw config before validation.
inline void apply_overrides(json& root, const Overrides& o) {
  if (!root.is_object()) return;
  if (o.alpha || o.dim || o.reg_factor) {
    if (!root.contains("kernel") || !root["kernel"].is_object()) root["kernel"] = json::object();
    if (o.alpha) root["kernel"]["alpha"] = *o.alpha;
    if (o.dim) root["kernel"]["dim"] = *o.dim;
    if (o.reg_factor) root["kernel"]["reg_factor"] = *o.reg_factor;
  }
  if (o.nodes && root.contains("geometry") && root["geometry"].is_object()) {
    json& g = root["geometry"];
    const std::string gen = g.value("generator", "");
    if (gen == "truncation_family") {
      g["nodes_per_shell"] = *o.nodes;
    } else if (gen == "ball_ray") {
      g["count_per_ball"] = *o.nodes;
    } else {
      g["count"] = *o.nodes;
    }
  }
}

inline ScenarioConfig parse_config(const json& root, const std::filesystem::path& base_dir = ".") {
  if (!root.is_object()) throw ConfigError("$", "config must be a JSON object");
  detail::only_keys(root, "", {"name", "description", "budget_seconds", "kind", "geometry", "field", "kernel", "solver",
                               "output", "sweep", "thinness", "kelvin", "balayage"});
  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  if (root.contains("description") && !root.at("description").is_string()) {
    throw ConfigError("description", "expected a string");
  }
  if (root.contains("budget_seconds")) detail::positive(root.at("budget_seconds"), "budget_seconds");
  cfg.kind = parse_kind(detail::require(root, "kind", ""));
  cfg.kernel = detail::parse_kernel(detail::object_at(root, "kernel", ""));
  const int dim = cfg.kernel.dim();
  cfg.geometry = detail::object_at(root, "geometry", "");
  detail::check_geometry(cfg.geometry, dim, cfg.kind);
  cfg.field = detail::parse_field(root, dim);
  cfg.solver = detail::parse_solver(root);

  if (root.contains("output")) {
    const json& o = detail::object_at(root, "output", "");
    detail::only_keys(o, "output.", {"directory", "formats"});
    if (o.contains("directory")) {
      if (!o.at("directory").is_string()) throw ConfigError("output.directory", "expected a string");
      cfg.output.directory = o.at("directory").get<std::string>();
    }
    if (o.contains("formats")) {
      const json& f = o.at("formats");
      if (!f.is_array()) throw ConfigError("output.formats", "expected an array");
      cfg.output.csv = cfg.output.json = false;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f.at(i) == "csv") {
          cfg.output.csv = true;
        } else if (f.at(i) == "json") {
          cfg.output.json = true;
        } else {
          throw ConfigError("output.formats[" + std::to_string(i) + "]", "must be csv or json");
        }
      }
    }
  }
  if (root.contains("sweep")) {
    if (cfg.kind != Kind::sweep) throw ConfigError("sweep", "only valid for kind sweep");
    const json& s = detail::object_at(root, "sweep", "");
    detail::only_keys(s, "sweep.", {"margin", "support_threshold", "objective_slack", "parallel"});
    if (s.contains("margin")) cfg.sweep.margin = detail::positive(s.at("margin"), "sweep.margin");
    if (s.contains("support_threshold")) {
      cfg.sweep.support_threshold = detail::positive(s.at("support_threshold"), "sweep.support_threshold");
    }
    if (s.contains("objective_slack")) {
      cfg.sweep.objective_slack = detail::positive(s.at("objective_slack"), "sweep.objective_slack");
    }
    if (s.contains("parallel")) {
      if (!s.at("parallel").is_boolean()) throw ConfigError("sweep.parallel", "expected a boolean");
      cfg.sweep.parallel = s.at("parallel").get<bool>();
    }
  }
  if (root.contains("thinness")) {
    const json& t = detail::object_at(root, "thinness", "");
    detail::only_keys(t, "thinness.", {"q"});
    if (t.contains("q")) cfg.thinness_q = detail::number(t.at("q"), "thinness.q");
    if (!(cfg.thinness_q > 1.0)) throw ConfigError("thinness.q", "must exceed 1");
  }
  cfg.kelvin_center = Eigen::VectorXd::Zero(dim);
  if (root.contains("kelvin")) {
    const json& k = detail::object_at(root, "kelvin", "");
    detail::only_keys(k, "kelvin.", {"center", "samples", "sample_radius"});
    if (k.contains("center")) cfg.kelvin_center = detail::vector_of(k.at("center"), "kelvin.center", dim);
    if (k.contains("samples")) cfg.kelvin_samples = detail::integer(k.at("samples"), "kelvin.samples", 2);
    if (k.contains("sample_radius")) {
      cfg.kelvin_sample_radius = detail::positive(k.at("sample_radius"), "kelvin.sample_radius");
    }
  }
  if (root.contains("balayage")) {
    const json& b = detail::object_at(root, "balayage", "");
    detail::only_keys(b, "balayage.", {"tol"});
    if (b.contains("tol")) cfg.balayage_tol = detail::positive(b.at("tol"), "balayage.tol");
  }

  if (cfg.kind == Kind::balayage_check) {
    if (cfg.kernel.alpha() > 2.0) throw ConfigError("kernel.alpha", "balayage_check needs alpha <= 2");
    for (std::size_t i = 0; i < cfg.field.atoms.size(); ++i) {
      if (cfg.field.atoms[i].mass < 0.0) {
        throw ConfigError("field.atoms[" + std::to_string(i) + "].mass", "balayage_check needs a positive field");
      }
    }
  }
  if ((cfg.kind == Kind::capacitary || cfg.kind == Kind::thinness || cfg.kind == Kind::kelvin_check) &&
      !cfg.field.atoms.empty()) {
    throw ConfigError("field", "kind " + kind_name(cfg.kind) + " takes no field; use \"none\"");
  }
  return cfg;
}

/// Builds the single node set of a non-sweep scenario.
inline NodeSet build_nodes(const ScenarioConfig& cfg) {
  const json& g = cfg.geometry;
  const int dim = cfg.kernel.dim();
  const std::string gen = g.at("generator").get<std::string>();
  const double radius = g.value("radius", 1.0);
  if (gen == "sphere") return make_sphere(detail::center_of(g, "center", dim), radius, g.at("count").get<int>(), dim);
  if (gen == "ball") return make_ball(detail::center_of(g, "center", dim), radius, g.at("count").get<int>(), dim);
  if (gen == "inverted_ball") {
    const NodeSet ball = make_ball(detail::center_of(g, "center", dim), radius, g.at("count").get<int>(), dim);
    return invert(ball, detail::center_of(g, "inversion_center", dim));
  }
  if (gen == "truncated_complement") {
    const double inner = g.at("inner_radius").get<double>();
    const double ratio = g.value("shell_ratio", kDefaultShellRatio);
    const double outer =
        g.contains("outer_radius") ? g.at("outer_radius").get<double>() : inner * std::pow(ratio, g.at("shells").get<int>() - 1);
    return make_truncated_complement(inner, outer, g.at("count").get<int>(), dim, ratio);
  }
  if (gen == "ball_ray") {
    return make_ball_ray(g.at("q").get<double>(), g.at("balls").get<int>(), g.at("ball_radius").get<double>(),
                         g.at("count_per_ball").get<int>(), dim);
  }
  if (gen == "csv") {
    std::filesystem::path path = g.at("path").get<std::string>();
    if (path.is_relative()) path = cfg.base_dir / path;
    std::ifstream in(path);
    if (!in) throw ConfigError("geometry.path", "cannot open " + path.string());
    NodeSet nodes = io::read_nodeset_csv(in);
    if (nodes.dim() != dim) throw ConfigError("geometry.path", "node CSV dimension differs from kernel.dim");
    return nodes;
  }
  throw ConfigError("geometry.generator", "generator '" + gen + "' does not produce a single node set");
}

inline std::vector<NodeSet> build_family(const ScenarioConfig& cfg) {
  const json& g = cfg.geometry;
  return truncation_family(g.at("inner_radius").get<double>(), g.at("outer_radii").get<std::vector<double>>(),
                           g.at("nodes_per_shell").get<int>(), cfg.kernel.dim(),
                           g.value("shell_ratio", kDefaultShellRatio));
}

inline SignedMeasure build_field(const ScenarioConfig& cfg) {
  const int dim = cfg.kernel.dim();
  if (cfg.field.atoms.empty()) return SignedMeasure::zero(dim);
  Eigen::MatrixXd coords(dim, static_cast<Eigen::Index>(cfg.field.atoms.size()));
  Eigen::VectorXd w(coords.cols());
  for (std::size_t i = 0; i < cfg.field.atoms.size(); ++i) {
    coords.col(static_cast<Eigen::Index>(i)) = cfg.field.atoms[i].at;
    w[static_cast<Eigen::Index>(i)] = cfg.field.atoms[i].mass;
  }
  return SignedMeasure::from_signed(NodeSet::from_points(std::move(coords)), w);
}

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> files;
};

namespace detail {

class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, const OutputSpec& spec, RunResult& result)
      : dir_(std::move(dir)), spec_(spec), result_(result) {
    std::filesystem::create_directories(dir_);
  }

  template <class F>
  void csv(const std::string& name, F&& write) {
    if (spec_.csv) emit(name, write);
  }

  void json_file(const std::string& name, const json& j) {
    if (spec_.json) emit(name, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  }

 private:
  template <class F>
  void emit(const std::string& name, F&& write) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write(out);
    result_.files.push_back(path.string());
  }

  std::filesystem::path dir_;
  OutputSpec spec_;
  RunResult& result_;
};

inline std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

inline json characterization_json(const CharacterizationReport& r) {
  json j;
  j["min_excess"] = r.min_excess;
  j["complementarity"] = r.complementarity;
  j["scale"] = r.scale;
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  if (r.equilibrium_constant) j["equilibrium_constant"] = *r.equilibrium_constant;
  if (r.constant_gap) j["constant_gap"] = *r.constant_gap;
  return j;
}

inline std::string solve_line(const std::string& what, const Solution& sol) {
  std::string line = what + ": nodes=" + std::to_string(sol.measure.size()) + " mass=" + fmt(total_mass(sol.measure)) +
                     " objective=" + fmt(sol.report.objective);
  if (sol.report.equilibrium_constant) line += " c=" + fmt(*sol.report.equilibrium_constant);
  line += " iterations=" + std::to_string(sol.report.iterations) +
          " converged=" + (sol.report.converged ? "true" : "false");
  return line;
}

}  // namespace detail

/// Runs one scenario, writing artifacts into `out_dir` and one summary line
/// per solve to `log`. Exit code 2 flags non-convergence; artifacts are
/// written regardless.
inline RunResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  RunResult result;
  detail::ArtifactWriter out(out_dir, cfg.output, result);
  const KernelContext& ctx = cfg.kernel;
  bool all_converged = true;
  const double check_tol = 10.0 * cfg.solver.kkt_tol;

  SignedMeasure omega = build_field(cfg);

  switch (cfg.kind) {
    case Kind::pseudo_balayage:
    case Kind::gauss_variational: {
      const NodeSet nodes = build_nodes(cfg);
      const KernelMatrix k = kernel_matrix(nodes, ctx);
      if (cfg.field.normalize_by_cone_mass) {
        const Solution base = solve_pseudo_balayage(omega, k, cfg.solver);
        log << detail::solve_line("normalizing pseudo_balayage", base) << '\n';
        all_converged = all_converged && base.report.converged;
        const double q = total_mass(base.measure);
        if (!(q > 0.0)) throw ConfigError("field.normalize", "cone mass is zero; cannot normalize");
        omega = omega.scaled(1.0 / q);
      }
      const bool cone = cfg.kind == Kind::pseudo_balayage;
      const Solution sol = cone ? solve_pseudo_balayage(omega, k, cfg.solver) : solve_gauss_variational(omega, k, cfg.solver);
      all_converged = all_converged && sol.report.converged;
      const CharacterizationReport check =
          cone ? check_pseudo_balayage(sol, check_tol) : check_weighted_equilibrium(sol, check_tol);
      log << detail::solve_line(kind_name(cfg.kind), sol) << " check=" << (check.pass ? "pass" : "fail") << '\n';
      out.csv("measure.csv", [&](std::ostream& s) { io::write_measure_csv(s, sol.measure); });
      out.json_file("report.json", io::report_to_json(sol.report, total_mass(sol.measure)));
      out.json_file("characterization.json", detail::characterization_json(check));
      break;
    }
    case Kind::capacitary: {
      const NodeSet nodes = build_nodes(cfg);
      const CapacitaryResult cap = solve_capacitary(nodes, ctx, cfg.solver);
      all_converged = cap.report.converged;
      log << "capacitary: nodes=" << nodes.size() << " capacity=" << detail::fmt(cap.capacity)
          << " iterations=" << cap.report.iterations << " converged=" << (cap.report.converged ? "true" : "false")
          << '\n';
      out.csv("measure.csv", [&](std::ostream& s) { io::write_measure_csv(s, cap.gamma); });
      out.json_file("report.json", io::report_to_json(cap.report, cap.capacity));
      break;
    }
    case Kind::sweep: {
      const std::vector<NodeSet> family = build_family(cfg);
      if (cfg.field.normalize_by_cone_mass) {
        const Solution base = solve_pseudo_balayage(omega, family.back(), ctx, cfg.solver);
        log << detail::solve_line("normalizing pseudo_balayage", base) << '\n';
        all_converged = all_converged && base.report.converged;
        const double q = total_mass(base.measure);
        if (!(q > 0.0)) throw ConfigError("field.normalize", "cone mass is zero; cannot normalize");
        omega = omega.scaled(1.0 / q);
      }
      const SweepResult sweep = truncation_sweep(omega, family, ctx, cfg.solver, cfg.sweep);
      for (const SweepRecord& r : sweep.records) {
        all_converged = all_converged && r.converged;
        log << "sweep member: radius=" << detail::fmt(r.truncation_radius) << " cone_mass=" << detail::fmt(r.cone_mass)
            << " slice_objective=" << detail::fmt(r.slice_objective) << " c=" << detail::fmt(r.equilibrium_constant)
            << " converged=" << (r.converged ? "true" : "false") << '\n';
      }
      log << "sweep: verdict=" << to_string(sweep.verdict) << " m_infinity=" << detail::fmt(sweep.m_infinity)
          << " margin=" << detail::fmt(sweep.margin) << '\n';
      out.csv("sweep.csv", [&](std::ostream& s) { io::write_sweep_csv(s, sweep.records); });
      json cls = io::classification_to_json(sweep);
      cls["cone_objective_limit"] = sweep.cone_objective_limit;
      cls["slice_objective_limit"] = sweep.slice_objective_limit;
      cls["cone_monotone"] = sweep.cone_monotone;
      cls["slice_monotone"] = sweep.slice_monotone;
      cls["support_radius_stabilized"] = support_radius_stabilized(sweep.records);
      out.json_file("classification.json", cls);
      break;
    }
    case Kind::thinness: {
      const NodeSet nodes = build_nodes(cfg);
      SolverConfig scfg = cfg.solver;
      const std::vector<double> caps = shell_capacities(nodes, cfg.thinness_q, ctx, scfg);
      const ThinnessSeries series = thinness_series(caps, cfg.thinness_q, ctx.alpha(), ctx.dim());
      log << "thinness: shells=" << caps.size() << " partial_sum="
          << detail::fmt(series.partial_sums.empty() ? 0.0 : series.partial_sums.back())
          << " tail_ratio=" << detail::fmt(series.tail_ratio) << " verdict=" << to_string(series.verdict) << '\n';
      out.csv("thinness.csv", [&](std::ostream& s) {
        s << "shell,capacity,term,partial_sum\n";
        for (std::size_t j = 0; j < caps.size(); ++j) {
          s << j << ',' << io::format_number(caps[j]) << ',' << io::format_number(series.terms[j]) << ','
            << io::format_number(series.partial_sums[j]) << '\n';
        }
      });
      json j;
      j["verdict"] = to_string(series.verdict);
      j["tail_ratio"] = series.tail_ratio;
      j["q"] = cfg.thinness_q;
      j["shells"] = caps.size();
      out.json_file("thinness.json", j);
      break;
    }
    case Kind::kelvin_check: {
      const NodeSet nodes = build_nodes(cfg);
      const CapacitaryResult cap = solve_capacitary(nodes, ctx, cfg.solver);
      all_converged = cap.report.converged;
      const Point center(cfg.kelvin_center);
      const NodeSet sample_nodes = make_sphere(center, cfg.kelvin_sample_radius, cfg.kelvin_samples, ctx.dim());
      std::vector<Point> samples;
      for (Eigen::Index i = 0; i < sample_nodes.size(); ++i) samples.push_back(sample_nodes.point(i));
      const KelvinReport rep = check_kelvin_identities(cap.gamma, center, ctx, samples);
      log << "kelvin_check: atoms=" << cap.gamma.size() << " capacity=" << detail::fmt(cap.capacity)
          << " mass_err=" << detail::fmt(rep.mass_identity_error)
          << " energy_err=" << detail::fmt(rep.energy_identity_error)
          << " potential_err=" << detail::fmt(rep.potential_identity_error)
          << " converged=" << (cap.report.converged ? "true" : "false") << '\n';
      out.csv("measure.csv", [&](std::ostream& s) { io::write_measure_csv(s, cap.gamma); });
      out.csv("kelvin_image.csv",
              [&](std::ostream& s) { io::write_measure_csv(s, kelvin_transform(cap.gamma, center, ctx)); });
      json j;
      j["capacity"] = cap.capacity;
      j["mass_identity_error"] = rep.mass_identity_error;
      j["energy_identity_error"] = rep.energy_identity_error;
      j["potential_identity_error"] = rep.potential_identity_error;
      out.json_file("kelvin.json", j);
      break;
    }
    case Kind::balayage_check: {
      const NodeSet nodes = build_nodes(cfg);
      const BalayageReport rep = check_balayage_specialization(omega.plus(), nodes, ctx, cfg.balayage_tol, cfg.solver);
      all_converged = rep.solution.report.converged;
      log << detail::solve_line("balayage_check", rep.solution)
          << " max_relative_residual=" << detail::fmt(rep.max_relative_residual)
          << " check=" << (rep.pass ? "pass" : "fail") << '\n';
      out.csv("measure.csv", [&](std::ostream& s) { io::write_measure_csv(s, rep.solution.measure); });
      out.json_file("report.json", io::report_to_json(rep.solution.report, rep.total_mass));
      json j;
      j["max_relative_residual"] = rep.max_relative_residual;
      j["total_mass"] = rep.total_mass;
      j["tol"] = cfg.balayage_tol;
      j["pass"] = rep.pass;
      out.json_file("balayage.json", j);
      break;
    }
  }
  result.exit_code = all_converged ? 0 : 2;
  return result;
}

/// Reads and parses a config file; I/O and JSON syntax errors become ConfigError.
inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace riesz::scenario
