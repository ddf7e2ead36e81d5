#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "varspace/serialize.hpp"

namespace varspace::cli {

using nlohmann::json;

Section::Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw ConfigError(path_, "expected an object");
}

std::string Section::path_of(const std::string& key) const {
  if (key.empty()) return path_;
  return path_.empty() ? key : path_ + "." + key;
}

bool Section::has(const std::string& key) const { return j_.contains(key); }

const json& Section::at(const std::string& key) {
  used_.insert(key);
  return j_.at(key);
}

const json& Section::raw(const std::string& key) {
  if (!has(key)) throw ConfigError(path_of(key), "missing required field");
  return at(key);
}

Section Section::child(const std::string& key) {
  static const json empty = json::object();
  if (!has(key)) return Section(empty, path_of(key));
  return Section(at(key), path_of(key));
}

double Section::number(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_number()) throw ConfigError(path_of(key), "expected a number");
  return v.get<double>();
}

double Section::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

int Section::integer(const std::string& key, int fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_number_integer()) throw ConfigError(path_of(key), "expected an integer");
  return v.get<int>();
}

std::uint64_t Section::seed(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_number_unsigned()) throw ConfigError(path_of(key), "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool Section::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(path_of(key), "expected true or false");
  return v.get<bool>();
}

std::string Section::string(const std::string& key, const std::string& fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_string()) throw ConfigError(path_of(key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> Section::numbers(const std::string& key, const std::vector<double>& fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(path_of(key), "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(path_of(key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<int> Section::integers(const std::string& key, const std::vector<int>& fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_array()) throw ConfigError(path_of(key), "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) {
      throw ConfigError(path_of(key) + "[" + std::to_string(i) + "]", "expected an integer");
    }
    out.push_back(v[i].get<int>());
  }
  return out;
}

void Section::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!used_.count(it.key())) throw ConfigError(path_of(it.key()), "unknown key");
  }
}

// ---------------------------------------------------------------------------

BoxDomain parse_domain(Section s) {
  const int dim = s.integer("dim", 1);
  if (dim < 1) throw ConfigError(s.path_of("dim"), "must be positive");
  auto bound = [&](const std::string& key, double fallback) {
    const std::vector<double> v = s.numbers(key, {fallback});
    if (v.size() == 1) return Eigen::VectorXd::Constant(dim, v[0]).eval();
    if (static_cast<int>(v.size()) != dim) throw ConfigError(s.path_of(key), "length must be 1 or dim");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), dim).eval();
  };
  const Eigen::VectorXd lo = bound("lo", -1.0);
  const Eigen::VectorXd hi = bound("hi", 1.0);
  s.finish();
  try {
    return BoxDomain(lo, hi);
  } catch (const std::exception& e) {
    throw ConfigError(s.path_of("lo"), e.what());
  }
}

DictionaryConfig parse_dictionary(Section s) {
  DictionaryConfig c;
  try {
    c.family = family_from_string(s.string("family", "ridge"));
  } catch (const std::exception& e) {
    throw ConfigError(s.path_of("family"), e.what());
  }
  c.domain = parse_domain(s.child("domain"));
  c.k = s.integer("k", c.k);
  c.c1 = s.number("c1", c.c1);
  c.c2 = s.number("c2", c.c2);
  c.s = s.number("s", c.s);
  Section g = s.child("grid");
  c.grid.directions = g.integer("directions", c.grid.directions);
  c.grid.offsets = g.integer("offsets", c.grid.offsets);
  c.grid.lattice_step = g.number("lattice_step", c.grid.lattice_step);
  c.grid.lattice_radius = g.number("lattice_radius", c.grid.lattice_radius);
  g.finish();
  s.finish();
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(s.path_of(""), e.what());
  }
  return c;
}

QuadratureSpec parse_quadrature(Section s) {
  QuadratureSpec q;
  const std::string kind = s.string("kind", "gauss");
  if (kind == "gauss") {
    q.kind = QuadratureKind::TensorGauss;
  } else if (kind == "qmc") {
    q.kind = QuadratureKind::QuasiMonteCarlo;
  } else {
    throw ConfigError(s.path_of("kind"), "expected \"gauss\" or \"qmc\"");
  }
  q.level = s.integer("level", q.level);
  if (q.level < 1) throw ConfigError(s.path_of("level"), "must be positive");
  s.finish();
  return q;
}

SolverOptions parse_solver(Section s) {
  SolverOptions o;
  o.epsilon = s.number("epsilon", o.epsilon);
  o.relative_epsilon = s.number("relative_epsilon", o.relative_epsilon);
  o.max_atoms = s.integer("max_atoms", o.max_atoms);
  o.max_iterations = s.integer("max_iterations", o.max_iterations);
  o.lambda_floor = s.number("lambda_floor", o.lambda_floor);
  o.refine_steps = s.integer("refine_steps", o.refine_steps);
  o.refine_candidates = s.integer("refine_candidates", o.refine_candidates);
  o.slide_iterations = s.integer("slide_iterations", o.slide_iterations);
  o.slide_sweeps = s.integer("slide_sweeps", o.slide_sweeps);
  o.stall_iterations = s.integer("stall_iterations", o.stall_iterations);
  o.kkt_continuation = s.boolean("kkt_continuation", o.kkt_continuation);
  if (o.max_atoms < 1) throw ConfigError(s.path_of("max_atoms"), "must be positive");
  if (o.max_iterations < 1) throw ConfigError(s.path_of("max_iterations"), "must be positive");
  if (!(o.relative_epsilon > 0.0) && !(o.epsilon > 0.0)) {
    throw ConfigError(s.path_of("relative_epsilon"), "a positive tolerance is required");
  }
  if (o.refine_candidates < 1) throw ConfigError(s.path_of("refine_candidates"), "must be positive");
  if (o.slide_iterations < 0) throw ConfigError(s.path_of("slide_iterations"), "must be >= 0");
  if (o.slide_sweeps < 0) throw ConfigError(s.path_of("slide_sweeps"), "must be >= 0");
  if (!(o.lambda_floor > 0.0)) throw ConfigError(s.path_of("lambda_floor"), "must be positive");
  s.finish();
  return o;
}

ExperimentConfig parse_config(const json& j, const std::string& expected_experiment) {
  Section root(j, "");
  ExperimentConfig c;
  c.source = j;
  c.experiment = root.string("experiment", expected_experiment);
  if (c.experiment != expected_experiment) {
    throw ConfigError("experiment", "config is for '" + c.experiment + "', not '" + expected_experiment + "'");
  }
  c.seed = root.seed("seed", c.seed);
  c.output_dir = root.string("output_dir", "");
  c.dictionary = parse_dictionary(root.child("dictionary"));
  c.quadrature = parse_quadrature(root.child("quadrature"));
  c.solver = parse_solver(root.child("solver"));
  if (root.has("params")) {
    c.params = root.raw("params");
    if (!c.params.is_object()) throw ConfigError("params", "expected an object");
  }
  root.finish();
  return c;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
}

std::string config_hash(const json& j) {
  const std::string text = dump_stable(j, 0);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace varspace::cli
