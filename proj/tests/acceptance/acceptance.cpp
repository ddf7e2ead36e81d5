// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "varspace/barron.hpp"
#include "varspace/greedy.hpp"
#include "varspace/onedim.hpp"
#include "varspace/spectral.hpp"

using namespace varspace;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

Eigen::VectorXd unit(std::initializer_list<double> v) {
  Eigen::VectorXd w(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) w[i++] = x;
  return w.normalized();
}

// 1. sampling rate
Outcome maurey() {
  Outcome o;
  DictionaryConfig cfg;
  cfg.domain = BoxDomain::cube(2, -1.0, 1.0);
  cfg.c1 = -2.0;
  cfg.c2 = 2.0;
  const auto q = build_quadrature(cfg.domain, 24, QuadratureKind::TensorGauss);
  const auto rep = random_ridge_combination(cfg, 50, 7);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < 20; ++i) seeds.push_back(1000 + i);
  const double kd = atom_norm_bound(cfg, *q);
  const RateSeries r = maurey_rate(rep, q, {4, 16, 64, 256}, seeds, kd);
  for (std::size_t i = 0; i < r.n.size(); ++i) {
    o.require(r.mean_error[i] <= r.bound[i], "n=" + std::to_string(r.n[i]) + " error above bound");
  }
  o.require(r.slope <= -0.4, "slope " + num(r.slope));
  if (o.pass) o.detail = "slope " + num(r.slope) + ", M " + num(rep.mass()) + ", K_D " + num(kd);
  return o;
}

// 2. upper/lower sandwich on targets with known representations
Outcome sandwich() {
  Outcome o;
  CounterRng rng(11);
  double worst = 0.0;
  int count = 0;
  for (int dim : {1, 2}) {
    DictionaryConfig cfg;
    cfg.domain = BoxDomain::cube(dim, -1.0, 1.0);
    cfg.c1 = dim == 1 ? -2.0 : -2.5;
    cfg.c2 = -cfg.c1;
    const auto q = build_quadrature(cfg.domain, dim == 1 ? 64 : 24, QuadratureKind::TensorGauss);
    for (int t = 0; t < 10; ++t) {
      RidgeCombination c;
      const int atoms = 1 + t % 3;
      for (int a = 0; a < atoms; ++a) {
        RidgeAtom at;
        at.k = 1;
        at.omega = random_direction(dim, rng);
        at.b = -0.8 + 1.6 * rng.uniform();
        c.push(at, (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + rng.uniform()));
      }
      const RealFunction f = synth(c, q);
      const auto up = variation_upper<RidgeAtom>(f, cfg);
      ++count;
      worst = std::max(worst, up.report.upper / c.mass());
      o.require(up.report.success, "solver failed on target " + std::to_string(count));
      o.require(up.report.upper <= 1.05 * c.mass(), "upper above known mass on target " + std::to_string(count));
      o.require(up.report.lower <= up.report.upper, "lower above upper on target " + std::to_string(count));
      if (t < 3) {
        const auto up2 = variation_upper<RidgeAtom>(2.0 * f, cfg);
        o.require(std::abs(up2.report.upper - 2.0 * up.report.upper) <= 0.05 * 2.0 * up.report.upper,
                  "homogeneity");
        RidgeCombination g;
        RidgeAtom at;
        at.omega = random_direction(dim, rng);
        at.b = 0.1;
        g.push(at, 1.0);
        const RealFunction gf = synth(g, q);
        const auto ug = variation_upper<RidgeAtom>(gf, cfg);
        const auto us = variation_upper<RidgeAtom>(f + gf, cfg);
        o.require(us.report.upper <= 1.05 * (up.report.upper + ug.report.upper), "triangle");
      }
    }
  }
  if (o.pass) o.detail = std::to_string(count) + " targets, max upper/mass " + num(worst);
  return o;
}

// 3. one-dimensional equivalence
Outcome equivalence() {
  Outcome o;
  const auto suite = default_equivalence_suite();
  std::vector<std::string> ids;
  for (const auto& c : suite) ids.push_back(c.f.id());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  o.require(ids.size() >= 8, "suite has fewer than 8 functions");
  const auto rows = equivalence_experiment(suite);
  double lo = 1e300, hi = 0.0, drift = 0.0;
  for (const auto& r : rows) {
    const std::string tag = r.id + " k=" + std::to_string(r.k);
    o.require(r.success, tag + " solver " + r.status);
    o.require(r.ratio >= 0.1 && r.ratio <= 10.0, tag + " ratio " + num(r.ratio));
    if (r.id == "relu1" || r.id == "relu2") o.require(r.ratio <= 1.05, tag + " atom ratio " + num(r.ratio));
    o.require(std::abs(r.refinement_ratio - 1.0) < 0.2, tag + " level drift");
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    drift = std::max(drift, std::abs(r.refinement_ratio - 1.0));
  }
  if (o.pass) o.detail = "ratios in [" + num(lo) + ", " + num(hi) + "], max drift " + num(drift);
  return o;
}

// 4. Peano synthesis
Outcome peano() {
  Outcome o;
  const auto q = build_quadrature(BoxDomain::cube(1, -1.0, 1.0), 32, QuadratureKind::TensorGauss);
  double constant = 0.0, worst_res = 0.0;
  struct Row {
    double mass, chi;
  };
  std::vector<Row> rows;
  for (const auto& c : default_equivalence_suite()) {
    if (c.f.is_piecewise() && (!c.f.as_piecewise().breakpoints.empty() || c.f.as_piecewise().degree() > c.k)) {
      continue;
    }
    const PeanoResult r = peano_synthesis(c.f, c.k, q, -2.0, 2.0);
    worst_res = std::max(worst_res, r.residual);
    o.require(r.residual <= 1e-6, c.f.id() + " residual " + num(r.residual));
    constant = std::max(constant, r.constant);
    rows.push_back({r.mass(), r.characterization});
  }
  for (const auto& r : rows) o.require(r.mass <= constant * r.chi * (1 + 1e-12), "mass above C * norm");
  if (o.pass) o.detail = std::to_string(rows.size()) + " functions, C " + num(constant) + ", residual " + num(worst_res);
  return o;
}

// 5. spectral equality, one side
Outcome spectral() {
  Outcome o;
  DictionaryConfig cfg;
  cfg.family = Family::Spectral;
  const FourierPair g = gaussian_pair(1, 1.0);
  for (double s : {0.0, 1.0}) {
    const EqualityRow r = fs_equality_experiment(g, cfg, 32, 3.0, SolverOptions{}, 0.1);
    o.require(r.success && r.passed, "gaussian s=" + num(s) + " " + r.status);
  }
  const auto q = build_quadrature(cfg.domain, 32, QuadratureKind::TensorGauss);
  double worst = 0.0;
  for (double s : {0.0, 1.0}) {
    cfg.s = s;
    for (double xi0 : {0.0, 0.5, 1.25, -2.7}) {
      const ComplexFunction f = sample_complex(
          [xi0](const Eigen::VectorXd& x) { return std::exp(Complex(0.0, 2.0 * M_PI * xi0 * x[0])); }, q);
      const auto up = variation_upper<SpectralAtom>(f, cfg);
      const double scale = std::pow(1.0 + std::abs(xi0), s);
      worst = std::max(worst, up.report.upper / scale);
      o.require(up.report.success && up.report.upper <= 1.05 * scale, "atom xi=" + num(xi0) + " s=" + num(s));
    }
  }
  if (o.pass) o.detail = "max atom upper/scale " + num(worst);
  return o;
}

// 6. cutoff construction
Outcome cutoff() {
  Outcome o;
  for (double R : {0.1, 1.0, 10.0, 1000.0}) {
    o.require(std::abs(gaussian_factor_integral(R, 0.0) - 1.0) <= 1e-8, "s=0 integral at R=" + num(R));
  }
  std::vector<double> v;
  for (double R : {1.0, 10.0, 100.0}) v.push_back(gaussian_factor_integral(R, 1.0));
  o.require(v[0] > v[1] && v[1] > v[2], "s=1 integrals not decreasing");
  o.require(v[2] <= 1.1, "R=100 integral " + num(v[2]));
  std::vector<double> totals;
  for (double R : {1.0, 10.0, 100.0}) {
    const CutoffReport c = build_cutoff(R, 1.0, 1.0, 4);
    o.require(c.on_domain_max_error <= 1e-10, "on-domain error at R=" + num(R));
    totals.push_back(c.total);
  }
  o.require(totals[0] > totals[1] && totals[1] > totals[2], "totals not decreasing");
  if (o.pass) o.detail = "totals " + num(totals[0]) + " > " + num(totals[1]) + " > " + num(totals[2]);
  return o;
}

// 7. Barron constructions
Outcome barron() {
  Outcome o;
  CounterRng rng(5);
  const int dims[] = {1, 2, 4, 8};
  double worst_l1 = 0.0, worst_err = 0.0, worst_emb = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int d = dims[i % 4];
    const BoxDomain dom = BoxDomain::cube(d, -1.0, 1.0);
    const double c1 = -(dom.max_radius() + 1.0), c2 = dom.max_radius() + 2.0;
    Points x(d, 500);
    for (Index j = 0; j < x.cols(); ++j) {
      for (int a = 0; a < d; ++a) x(a, j) = 2.0 * rng.uniform() - 1.0;
    }
    x.col(0).setConstant(1.0);
    x.col(1).setConstant(-1.0);

    const BarronAtom ba = random_barron_atom(d, rng, c1 - 2.0, c2 + 2.0);
    const RidgeCombination dec = decompose_barron_atom(ba, dom, c1, c2);
    worst_l1 = std::max(worst_l1, dec.mass());
    worst_err = std::max(worst_err, (evaluate(dec, x) - eval_barron(ba, x)).cwiseAbs().maxCoeff());

    RidgeAtom ra;
    ra.omega = random_direction(d, rng);
    ra.b = c1 + (c2 - c1) * rng.uniform();
    const RidgeEmbedding e = embed_ridge_in_barron(ra);
    o.require(e.coefficient <= std::sqrt(double(d)) + std::max(std::abs(c1), std::abs(c2)), "embedding coefficient");
    worst_emb = std::max(worst_emb, (e.coefficient * eval_barron(e.atom, x) - eval_ridge(ra, x)).cwiseAbs().maxCoeff());
  }
  o.require(worst_l1 <= 4.0, "decomposition l1 " + num(worst_l1));
  o.require(worst_err <= 1e-10, "decomposition error " + num(worst_err));
  o.require(worst_emb <= 1e-10, "embedding error " + num(worst_emb));
  if (o.pass) o.detail = "max l1 " + num(worst_l1) + ", errors " + num(worst_err) + " / " + num(worst_emb);
  return o;
}

// 8. polynomial activation collapses the span
Outcome degeneracy() {
  Outcome o;
  const auto q = build_quadrature(BoxDomain::cube(2, -1.0, 1.0), 24, QuadratureKind::TensorGauss);
  CounterRng rng(8);
  Eigen::MatrixXd square(q->size(), 200), relu(q->size(), 200);
  for (int i = 0; i < 200; ++i) {
    RidgeAtom a;
    a.omega = random_direction(2, rng);
    a.b = -2.0 + 4.0 * rng.uniform();
    square.col(i) = eval_activation([](double t) { return t * t; }, a.omega, a.b, q->nodes());
    relu.col(i) = eval_ridge(a, q->nodes());
  }
  const int r2 = gram_rank(square, *q, 1e-8);
  const int r1 = gram_rank(relu, *q, 1e-8);
  o.require(r2 <= 6, "square rank " + std::to_string(r2));
  o.require(r1 >= 50, "relu rank " + std::to_string(r1));
  o.detail = "ranks " + std::to_string(r2) + " vs " + std::to_string(r1);
  return o;
}

// 9. quotient norm
Outcome quotient() {
  Outcome o;
  for (int k : {1, 2}) {
    DictionaryConfig cfg;
    cfg.k = k;
    cfg.domain = BoxDomain::cube(2, -1.0, 1.0);
    cfg.c1 = -2.5;
    cfg.c2 = 2.5;
    const auto q = build_quadrature(cfg.domain, 20, QuadratureKind::TensorGauss);
    const RealFunction poly = sample(
        [k](const Eigen::VectorXd& x) { return 0.4 - 1.3 * x[0] + 0.7 * x[1] + (k == 2 ? 0.9 * x[0] * x[1] : 0.0); }, q);
    const QuotientResult qp = quotient_variation_upper(poly, cfg, k);
    o.require(qp.report.upper <= std::max(qp.report.epsilon, 1e-9), "polynomial quotient " + num(qp.report.upper));

    const RealFunction g = sample([](const Eigen::VectorXd& x) { return std::exp(0.5 * x[0] - x[1]); }, q);
    RidgeCombination c;
    RidgeAtom a;
    a.k = k;
    a.omega = unit({1.0, 1.0});
    a.b = 0.3;
    c.push(a, 1.5);
    a.omega = unit({-1.0, 2.0});
    a.b = -0.2;
    c.push(a, -0.7);
    for (const RealFunction& f : {g, synth(c, q), g + poly}) {
      const double quot = quotient_variation_upper(f, cfg, k).report.upper;
      const double plain = variation_upper<RidgeAtom>(f, cfg).report.upper;
      o.require(quot <= plain * (1.0 + 1e-3), "quotient above plain for k=" + std::to_string(k));
    }

    RidgeCombination m;
    for (double b : {-3.0, 2.75, 4.0}) {
      a.omega = unit({std::cos(b), std::sin(b)});
      a.b = b;
      m.push(a, b);
    }
    const RadonSynthesis rs = radon_style_synthesis(m, k, cfg.c1, cfg.c2, q);
    o.require(rs.in_range_measure.empty() && rs.in_range.values.cwiseAbs().maxCoeff() == 0.0, "in-range part not empty");
    const Eigen::VectorXd fit = polynomial_fit(rs.polynomial, k);
    o.require((fit - rs.polynomial_coefficients).cwiseAbs().maxCoeff() <= 1e-8, "polynomial remainder mismatch");
  }
  if (o.pass) o.detail = "k=1,2 on [-1,1]^2";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. byte-identical reruns
Outcome determinism(const fs::path& configs) {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "varspace_acceptance";
  fs::remove_all(root);
  int files = 0;
  for (const std::string& name : cli::command_names()) {
    std::string stem = name;
    std::replace(stem.begin(), stem.end(), '-', '_');
    const fs::path cfg = configs / (stem + ".json");
    for (const char* run : {"a", "b"}) {
      cli::RunOptions opt;
      opt.config_path = cfg.string();
      opt.out_dir = (root / run / stem).string();
      opt.quiet = true;
      const int rc = cli::run_command(name, opt);
      o.require(rc == cli::kSuccess, name + " exit " + std::to_string(rc));
    }
    for (const auto& e : fs::directory_iterator(root / "a" / stem)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      o.require(slurp(e.path()) == slurp(root / "b" / stem / e.path().filename()), name + " " +
                e.path().filename().string() + " differs");
    }
  }
  o.require(files >= 6, "too few CSV outputs");
  if (o.pass) o.detail = std::to_string(files) + " CSV files identical";
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path configs = argc > 1 ? fs::path(argv[1]) : fs::path("configs");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"maurey-rate", maurey},
      {"gauge-sandwich", sandwich},
      {"onedim-equivalence", equivalence},
      {"peano-feasibility", peano},
      {"spectral-one-sided", spectral},
      {"cutoff", cutoff},
      {"barron-constructions", barron},
      {"polynomial-degeneracy", degeneracy},
      {"quotient-norm", quotient},
      {"determinism", [&] { return determinism(configs); }},
  };
  int failures = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s %2d %-22s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
