#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "config.hpp"
#include "varspace/barron.hpp"
#include "varspace/greedy.hpp"
#include "varspace/onedim.hpp"
#include "varspace/serialize.hpp"
#include "varspace/spectral.hpp"

namespace varspace::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Context {
  ExperimentConfig cfg;
  fs::path out;
  bool quiet = false;
  std::vector<std::string> outputs;
  json summary = json::object();

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out / name).string());
    f << content;
    outputs.push_back(name);
    if (!quiet) std::cout << "wrote " << (out / name).string() << '\n';
  }
  void note(const std::string& line) const {
    if (!quiet) std::cout << line << '\n';
  }
};

template <typename AtomT, typename Scalar>
json combination_json(const SparseCombination<AtomT, Scalar>& c) {
  json atoms = json::array(), coefs = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    atoms.push_back(to_json(c.atoms[i]));
    if constexpr (std::is_same_v<Scalar, Complex>) {
      coefs.push_back(json::array({c.coefficients[i].real(), c.coefficients[i].imag()}));
    } else {
      coefs.push_back(c.coefficients[i]);
    }
  }
  return {{"atoms", atoms}, {"coefficients", coefs}, {"mass", c.mass()}};
}

QuadraturePtr make_quadrature(const ExperimentConfig& cfg) {
  return build_quadrature(cfg.dictionary.domain, cfg.quadrature.level, cfg.quadrature.kind);
}

// ---------------------------------------------------------------------------
// estimate-norm

struct Target {
  std::string type;
  json atom;
  double coefficient = 1.0;
  json combination;
  int atoms = 10;
  std::uint64_t seed = 0;
  std::string id;
  std::string pair;
  double width = 1.0;
};

Target parse_target(Section s, std::uint64_t default_seed) {
  Target t;
  t.type = s.string("type", "");
  if (t.type == "atom") {
    t.atom = s.raw("atom");
    t.coefficient = s.number("coefficient", 1.0);
  } else if (t.type == "combination") {
    if (s.has("file")) {
      const std::string file = s.string("file", "");
      t.combination = load_json(file);
    } else {
      t.combination = {{"atoms", s.raw("atoms")}, {"coefficients", s.raw("coefficients")}};
    }
  } else if (t.type == "random") {
    t.atoms = s.integer("atoms", t.atoms);
    t.seed = s.seed("seed", default_seed);
    if (t.atoms < 1) throw ConfigError(s.path_of("atoms"), "must be positive");
  } else if (t.type == "profile") {
    t.id = s.string("id", "");
    try {
      builtin_profile(t.id);
    } catch (const std::exception& e) {
      throw ConfigError(s.path_of("id"), e.what());
    }
  } else if (t.type == "fourier") {
    t.pair = s.string("name", "gaussian");
    t.width = s.number("width", 1.0);
  } else {
    throw ConfigError(s.path_of("type"), "expected atom, combination, random, profile or fourier");
  }
  s.finish();
  return t;
}

// Samples the target; `known_mass` is set when the target carries a representation.
template <typename Scalar>
GridFunction<Scalar> sample_target(const Target& t, const ExperimentConfig& cfg, const QuadraturePtr& q,
                                   double& known_mass) {
  known_mass = -1.0;
  const int dim = cfg.dictionary.domain.dim();
  auto lift = [](const auto& g) {
    if constexpr (std::is_same_v<Scalar, Complex>) {
      if constexpr (std::is_same_v<std::decay_t<decltype(g)>, ComplexFunction>) {
        return g;
      } else {
        return to_complex(g);
      }
    } else {
      if constexpr (std::is_same_v<std::decay_t<decltype(g)>, ComplexFunction>) {
        throw ConfigError("params.target", "complex target needs the spectral family");
        return RealFunction{};
      } else {
        return g;
      }
    }
  };
  auto check_dim = [&](const Eigen::VectorXd& v, const std::string& path) {
    if (v.size() != dim) throw ConfigError(path, "atom dimension does not match the domain");
  };
  try {
    if (t.type == "atom") {
      const std::string fam = t.atom.value("family", "");
      if (fam == "ridge") {
        RidgeCombination c;
        c.push(ridge_atom_from_json(t.atom), t.coefficient);
        check_dim(c.atoms[0].omega, "params.target.atom.omega");
        known_mass = c.mass();
        return lift(synth(c, q));
      }
      if (fam == "spectral") {
        SpectralCombination c;
        c.push(spectral_atom_from_json(t.atom), t.coefficient);
        check_dim(c.atoms[0].xi, "params.target.atom.xi");
        known_mass = c.mass();
        return lift(synth(c, q));
      }
      if (fam == "barron") {
        SparseCombination<BarronAtom> c;
        c.push(barron_atom_from_json(t.atom), t.coefficient);
        check_dim(c.atoms[0].omega, "params.target.atom.omega");
        known_mass = c.mass();
        return lift(synth(c, q));
      }
      throw ConfigError("params.target.atom.family", "expected ridge, spectral or barron");
    }
    if (t.type == "combination") {
      const auto& atoms = t.combination.at("atoms");
      const std::string fam = atoms.empty() ? "ridge" : atoms[0].value("family", "");
      if (fam == "spectral") {
        const auto c = spectral_combination_from_json(t.combination);
        for (const auto& a : c.atoms) check_dim(a.xi, "params.target.atoms");
        known_mass = c.mass();
        return lift(synth(c, q));
      }
      const auto c = ridge_combination_from_json(t.combination);
      for (const auto& a : c.atoms) check_dim(a.omega, "params.target.atoms");
      known_mass = c.mass();
      return lift(synth(c, q));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("params.target", e.what());
  }
  if (t.type == "random") {
    if (cfg.dictionary.family != Family::Ridge) {
      throw ConfigError("params.target.type", "random targets need the ridge family");
    }
    const auto c = random_ridge_combination(cfg.dictionary, t.atoms, t.seed);
    known_mass = c.mass();
    return lift(synth(c, q));
  }
  if (t.type == "profile") {
    if (dim != 1) throw ConfigError("params.target.id", "profiles live on [-1, 1]");
    const ProfileFunction f = builtin_profile(t.id);
    return lift(sample([&](const Eigen::VectorXd& x) { return f(x[0]); }, q));
  }
  FourierPair pair;
  try {
    pair = builtin_pair(t.pair, dim, t.width);
  } catch (const std::exception& e) {
    throw ConfigError("params.target.name", e.what());
  }
  const ComplexFunction g = sample_complex(pair.spatial, q);
  if constexpr (std::is_same_v<Scalar, Complex>) {
    return g;
  } else {
    return {q, g.values.real()};
  }
}

template <typename AtomT>
int estimate_with(Context& ctx, const Target& target) {
  using Scalar = atom_scalar_t<AtomT>;
  const auto q = make_quadrature(ctx.cfg);
  double known = -1.0;
  const auto f = sample_target<Scalar>(target, ctx.cfg, q, known);
  const auto res = variation_upper<AtomT>(f, ctx.cfg.dictionary, ctx.cfg.solver);
  json report = to_json(res.report);
  report["combination"] = combination_json(res.combination);
  report["target_norm_l2"] = norm_l2(f);
  if (known >= 0.0) {
    report["known_mass"] = known;
    report["mass_ratio"] = known > 0.0 ? res.report.upper / known : 0.0;
  }
  ctx.write("report.json", dump_stable(report) + "\n");
  ctx.write("history.csv", history_csv(res.report));
  ctx.summary = {{"upper", res.report.upper}, {"lower", res.report.lower}, {"success", res.report.success},
                 {"status", res.report.status}};
  ctx.note("upper " + format_double(res.report.upper) + " residual " + format_double(res.report.residual) +
           " status " + res.report.status);
  return res.report.success ? kSuccess : kFailure;
}

int cmd_estimate_norm(Context& ctx) {
  Section p(ctx.cfg.params, "params");
  const Target target = parse_target(p.child("target"), ctx.cfg.seed);
  p.finish();
  switch (ctx.cfg.dictionary.family) {
    case Family::Ridge:
      return estimate_with<RidgeAtom>(ctx, target);
    case Family::Spectral:
      return estimate_with<SpectralAtom>(ctx, target);
    case Family::Barron:
      return estimate_with<BarronAtom>(ctx, target);
  }
  return kFailure;
}

// ---------------------------------------------------------------------------
// maurey-rate

int cmd_maurey_rate(Context& ctx) {
  Section p(ctx.cfg.params, "params");
  const int atoms = p.integer("atoms", 50);
  const std::vector<int> ns = p.integers("ns", {4, 16, 64, 256});
  const int nseeds = p.integer("seeds", 20);
  const double slope_max = p.number("slope_max", -0.4);
  p.finish();
  if (atoms < 1) throw ConfigError("params.atoms", "must be positive");
  if (nseeds < 1) throw ConfigError("params.seeds", "must be positive");
  if (ns.size() < 3) throw ConfigError("params.ns", "need at least three sample sizes");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1 || (i > 0 && ns[i] <= ns[i - 1])) throw ConfigError("params.ns", "must be positive and increasing");
  }
  if (ctx.cfg.dictionary.family != Family::Ridge) throw ConfigError("dictionary.family", "maurey-rate uses ridge atoms");

  const auto q = make_quadrature(ctx.cfg);
  const auto rep = random_ridge_combination(ctx.cfg.dictionary, atoms, ctx.cfg.seed);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < nseeds; ++i) seeds.push_back((ctx.cfg.seed << 20) + 1 + static_cast<std::uint64_t>(i));
  const double kd = atom_norm_bound(ctx.cfg.dictionary, *q);
  const RateSeries series = maurey_rate(rep, q, ns, seeds, kd);
  bool below = true;
  for (std::size_t i = 0; i < series.n.size(); ++i) below = below && series.mean_error[i] <= series.bound[i];
  const bool passed = below && series.slope <= slope_max;
  ctx.write("rate_series.csv", rate_series_csv(series));
  ctx.summary = {{"mass", rep.mass()}, {"atom_norm_bound", kd},    {"slope", series.slope},
                 {"intercept", series.intercept}, {"all_below_bound", below}, {"passed", passed}};
  ctx.write("representation.json", dump_stable(combination_json(rep)) + "\n");
  ctx.note("slope " + format_double(series.slope) + (passed ? " (pass)" : " (fail)"));
  return passed ? kSuccess : kFailure;
}

// ---------------------------------------------------------------------------
// onedim-equiv

int cmd_onedim_equiv(Context& ctx) {
  Section p(ctx.cfg.params, "params");
  std::vector<EquivalenceCase> suite;
  if (p.has("cases")) {
    const json& cases = p.raw("cases");
    if (!cases.is_array() || cases.empty()) throw ConfigError("params.cases", "expected a nonempty array");
    for (std::size_t i = 0; i < cases.size(); ++i) {
      Section c(cases[i], "params.cases[" + std::to_string(i) + "]");
      const std::string id = c.string("id", "");
      const int k = c.integer("k", 1);
      c.finish();
      if (k < 0) throw ConfigError(c.path_of("k"), "must be >= 0");
      try {
        suite.push_back({builtin_profile(id), k});
      } catch (const std::exception& e) {
        throw ConfigError(c.path_of("id"), e.what());
      }
    }
  } else {
    suite = default_equivalence_suite();
  }
  EquivalenceOptions opt;
  opt.level = ctx.cfg.quadrature.level;
  opt.window = p.number("window", opt.window);
  opt.c1 = ctx.cfg.dictionary.c1;
  opt.c2 = ctx.cfg.dictionary.c2;
  opt.grid.offsets = p.integer("offsets", opt.grid.offsets);
  opt.solver = ctx.cfg.solver;
  const bool peano = p.boolean("peano", true);
  p.finish();
  if (ctx.cfg.dictionary.domain.dim() != 1) throw ConfigError("dictionary.domain.dim", "must be 1");
  if (opt.level > 32) throw ConfigError("quadrature.level", "must be <= 32 (the refinement run doubles it)");
  if (!(opt.window >= 1.0)) throw ConfigError("params.window", "must be >= 1");

  const auto rows = equivalence_experiment(suite, opt);
  ctx.write("equivalence.csv", equivalence_csv(rows));
  bool all_in = true;
  for (const auto& r : rows) all_in = all_in && r.success && r.in_window;
  ctx.summary = {{"rows", rows.size()}, {"all_in_window", all_in}, {"window", opt.window}};

  if (peano) {
    const auto q = build_quadrature(BoxDomain::cube(1, -1.0, 1.0), opt.level, QuadratureKind::TensorGauss);
    std::ostringstream os;
    os << "function_id,k,residual,mass,constant,characterization_norm\n";
    for (const auto& c : suite) {
      try {
        const PeanoResult pr = peano_synthesis(c.f, c.k, q, opt.c1, opt.c2);
        os << c.f.id() << ',' << c.k << ',' << format_double(pr.residual) << ',' << format_double(pr.mass())
           << ',' << format_double(pr.constant) << ',' << format_double(pr.characterization) << '\n';
      } catch (const DomainError&) {
        // not representable by the Peano construction (e.g. kinks below order k)
      }
    }
    ctx.write("peano.csv", os.str());
  }
  ctx.note(std::string("ratios ") + (all_in ? "inside" : "NOT all inside") + " the window");
  return kSuccess;
}

// ---------------------------------------------------------------------------
// spectral-equiv

int cmd_spectral_equiv(Context& ctx) {
  Section p(ctx.cfg.params, "params");
  std::vector<std::pair<std::string, double>> pairs;
  if (p.has("pairs")) {
    const json& arr = p.raw("pairs");
    if (!arr.is_array() || arr.empty()) throw ConfigError("params.pairs", "expected a nonempty array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section c(arr[i], "params.pairs[" + std::to_string(i) + "]");
      pairs.emplace_back(c.string("name", "gaussian"), c.number("width", 1.0));
      c.finish();
    }
  } else {
    pairs.emplace_back("gaussian", 1.0);
  }
  const std::vector<double> ss = p.numbers("s", {0.0, 1.0});
  const double r_max = p.number("r_max", 3.0);
  const double slack = p.number("slack", 0.1);
  p.finish();
  if (ctx.cfg.dictionary.family != Family::Spectral) throw ConfigError("dictionary.family", "must be spectral");
  const int dim = ctx.cfg.dictionary.domain.dim();
  if (dim > 2) throw ConfigError("dictionary.domain.dim", "spectral quadrature supports d <= 2");
  std::vector<FourierPair> built;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      built.push_back(builtin_pair(pairs[i].first, dim, pairs[i].second));
    } catch (const std::exception& e) {
      throw ConfigError("params.pairs[" + std::to_string(i) + "]", e.what());
    }
  }
  for (double s : ss) {
    if (s < 0.0) throw ConfigError("params.s", "must be >= 0");
  }

  std::vector<EqualityRow> rows;
  bool all = true;
  for (const auto& pair : built) {
    for (double s : ss) {
      DictionaryConfig cfg = ctx.cfg.dictionary;
      cfg.s = s;
      EqualityRow row;
      try {
        row = fs_equality_experiment(pair, cfg, ctx.cfg.quadrature.level, r_max, ctx.cfg.solver, slack);
      } catch (const DomainError& e) {
        row.name = pair.name;
        row.s = s;
        row.status = e.what();
      }
      all = all && row.passed;
      rows.push_back(row);
    }
  }
  ctx.write("equality.csv", equality_csv(rows));
  ctx.summary = {{"rows", rows.size()}, {"all_passed", all}};
  ctx.note(std::string("one-sided check ") + (all ? "passed" : "did not pass on every row"));
  return kSuccess;
}

// ---------------------------------------------------------------------------
// cutoff

int cmd_cutoff(Context& ctx) {
  Section p(ctx.cfg.params, "params");
  const std::vector<double> rs = p.numbers("R", {1.0, 10.0, 100.0});
  const double s = p.number("s", 1.0);
  const double L = p.number("L", 1.0);
  const int k = p.integer("k", static_cast<int>(std::floor(s)) + 3);
  p.finish();
  for (double r : rs) {
    if (!(r > 0.0)) throw ConfigError("params.R", "values must be positive");
  }
  if (!(L > 0.0)) throw ConfigError("params.L", "must be positive");
  if (!(k > s + 2.0)) throw ConfigError("params.k", "smoothness must exceed s + 2");
  std::vector<CutoffReport> rows;
  for (double r : rs) rows.push_back(build_cutoff(r, s, L, k));
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    monotone = monotone && (rs[i] > rs[i - 1] ? rows[i].total < rows[i - 1].total : true);
  }
  ctx.write("cutoff.csv", cutoff_csv(rows));
  ctx.summary = {{"monotone_totals", monotone}};
  ctx.note(std::string("totals ") + (monotone ? "decrease" : "do not decrease") + " in R");
  return kSuccess;
}

// ---------------------------------------------------------------------------
// barron-decomp

int cmd_barron_decomp(Context& ctx) {
  Section p(ctx.cfg.params, "params");
  const int atoms = p.integer("atoms", 1000);
  const std::vector<int> dims = p.integers("dims", {1, 2, 4, 8});
  const int points = p.integer("sample_points", 2000);
  p.finish();
  if (atoms < 1) throw ConfigError("params.atoms", "must be positive");
  if (dims.empty()) throw ConfigError("params.dims", "must be nonempty");
  for (int d : dims) {
    if (d < 1) throw ConfigError("params.dims", "dimensions must be positive");
  }
  if (points < 1) throw ConfigError("params.sample_points", "must be positive");

  CounterRng rng(ctx.cfg.seed);
  std::map<int, Points> samples;
  for (int d : dims) {
    Points x(d, points);
    for (int j = 0; j < points; ++j) {
      for (int i = 0; i < d; ++i) x(i, j) = 2.0 * rng.uniform() - 1.0;
    }
    samples[d] = x;
  }
  std::ostringstream os;
  os << "index,d,decomposition_l1,decomposition_error,embedding_coefficient,embedding_bound,embedding_error\n";
  double worst_l1 = 0.0, worst_err = 0.0, worst_emb = 0.0;
  bool emb_ok = true;
  for (int i = 0; i < atoms; ++i) {
    const int d = dims[static_cast<std::size_t>(i) % dims.size()];
    const BoxDomain dom = BoxDomain::cube(d, -1.0, 1.0);
    const double radius = dom.max_radius();
    const double c1 = -(radius + 1.0), c2 = radius + 2.0;
    const Points& x = samples[d];

    const BarronAtom ba = random_barron_atom(d, rng, c1 - 2.0, c2 + 2.0);
    const RidgeCombination dec = decompose_barron_atom(ba, dom, c1, c2);
    const double err = (evaluate(dec, x) - eval_barron(ba, x)).cwiseAbs().maxCoeff();

    RidgeAtom ra;
    ra.k = 1;
    ra.omega = random_direction(d, rng);
    ra.b = c1 + (c2 - c1) * rng.uniform();
    const RidgeEmbedding emb = embed_ridge_in_barron(ra);
    const double bound = std::sqrt(static_cast<double>(d)) + std::max(std::abs(c1), std::abs(c2));
    const double emb_err = (emb.coefficient * eval_barron(emb.atom, x) - eval_ridge(ra, x)).cwiseAbs().maxCoeff();

    worst_l1 = std::max(worst_l1, dec.mass());
    worst_err = std::max(worst_err, err);
    worst_emb = std::max(worst_emb, emb_err);
    emb_ok = emb_ok && emb.coefficient <= bound;
    os << i << ',' << d << ',' << format_double(dec.mass()) << ',' << format_double(err) << ','
       << format_double(emb.coefficient) << ',' << format_double(bound) << ',' << format_double(emb_err) << '\n';
  }
  ctx.write("barron_decomp.csv", os.str());
  ctx.summary = {{"max_decomposition_l1", worst_l1},
                 {"max_decomposition_error", worst_err},
                 {"max_embedding_error", worst_emb},
                 {"embedding_within_bound", emb_ok}};
  ctx.note("max l1 " + format_double(worst_l1) + ", max error " + format_double(worst_err));
  return kSuccess;
}

using Handler = int (*)(Context&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"estimate-norm", cmd_estimate_norm}, {"maurey-rate", cmd_maurey_rate},
      {"onedim-equiv", cmd_onedim_equiv},   {"spectral-equiv", cmd_spectral_equiv},
      {"cutoff", cmd_cutoff},               {"barron-decomp", cmd_barron_decomp}};
  return h;
}

json error_json(const std::string& kind, const std::string& message, const std::string& path) {
  json e = {{"error", kind}, {"message", message}};
  if (kind == "config") e["path"] = path;
  return e;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"estimate-norm", "maurey-rate", "onedim-equiv",
                                              "spectral-equiv", "cutoff", "barron-decomp"};
  return names;
}

int run_command(const std::string& name, const RunOptions& options) {
  const std::string started = utc_now();
  Context ctx;
  ctx.quiet = options.quiet;
  json source = json::object();
  int code = kSuccess;
  json error;
  bool have_out = false;

  try {
    const auto it = handlers().find(name);
    if (it == handlers().end()) throw ConfigError("", "unknown command '" + name + "'");
    source = options.config_path.empty() ? json::object() : load_json(options.config_path);
    if (!options.out_dir.empty()) {
      ctx.out = options.out_dir;
      have_out = true;
    }
    ctx.cfg = parse_config(source, name);
    if (options.seed) ctx.cfg.seed = *options.seed;
    if (!have_out) ctx.out = ctx.cfg.output_dir.empty() ? fs::path("out") / name : fs::path(ctx.cfg.output_dir);
    have_out = true;
    fs::create_directories(ctx.out);
    code = it->second(ctx);
  } catch (const ConfigError& e) {
    code = kConfigError;
    error = error_json("config", e.what(), e.path());
  } catch (const std::exception& e) {
    code = kFailure;
    error = error_json("runtime", e.what(), "");
  }

  if (!error.is_null()) std::cerr << error.dump() << '\n';
  if (!have_out) return code;
  try {
    fs::create_directories(ctx.out);
    if (!error.is_null()) ctx.write("error.json", dump_stable(error) + "\n");
    if (!ctx.summary.empty()) ctx.write("summary.json", dump_stable(ctx.summary) + "\n");
    json manifest = {{"experiment", name},
                     {"config_hash", config_hash(source)},
                     {"seed", ctx.cfg.seed},
                     {"version", VARSPACE_VERSION},
                     {"started", started},
                     {"finished", utc_now()},
                     {"status", code == kSuccess ? "ok" : (code == kConfigError ? "config_error" : "failed")},
                     {"outputs", ctx.outputs}};
    std::ofstream f(ctx.out / "manifest.json", std::ios::binary);
    f << dump_stable(manifest) << '\n';
    if (!f) throw std::runtime_error("cannot write manifest.json");
  } catch (const std::exception& e) {
    std::cerr << error_json("runtime", e.what(), "").dump() << '\n';
    return code == kSuccess ? kFailure : code;
  }
  return code;
}

}  // namespace varspace::cli
