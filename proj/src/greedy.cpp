#include "varspace/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "detail/search.hpp"
#include "varspace/serialize.hpp"

namespace varspace {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t CounterRng::next_u64() {
  const std::uint64_t key = splitmix64(seed_ ^ 0xD1B54A32D192ED03ull);
  return splitmix64(key + 0x632BE59BD9B4E019ull * (counter_++));
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename AtomT, typename Scalar>
SparseCombination<AtomT, Scalar> maurey_sample(const SparseCombination<AtomT, Scalar>& representation,
                                               int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("maurey_sample: n must be positive");
  const double mass = representation.mass();
  if (!(mass > 0.0)) throw DomainError("maurey_sample: representation has zero mass");
  const std::size_t m = representation.size();
  std::vector<double> cdf(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    acc += std::abs(representation.coefficients[i]);
    cdf[i] = acc / mass;
  }
  cdf.back() = 1.0;
  CounterRng rng(seed);
  SparseCombination<AtomT, Scalar> out;
  out.atoms.reserve(static_cast<std::size_t>(n));
  out.coefficients.reserve(static_cast<std::size_t>(n));
  for (int draw = 0; draw < n; ++draw) {
    const double u = rng.uniform();
    std::size_t i = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    i = std::min(i, m - 1);
    // skip zero-weight atoms that share a cdf value with their successor
    while (std::abs(representation.coefficients[i]) == 0.0 && i + 1 < m) ++i;
    const Scalar a = representation.coefficients[i];
    const Scalar phase = a / std::abs(a);
    out.push(representation.atoms[i], phase * (mass / n));
  }
  return out;
}

template RidgeCombination maurey_sample(const RidgeCombination&, int, std::uint64_t);
template SpectralCombination maurey_sample(const SpectralCombination&, int, std::uint64_t);

RateFit rate_fit(const std::vector<int>& n, const std::vector<double>& errors) {
  if (n.size() != errors.size()) throw DomainError("rate_fit: size mismatch");
  RateFit fit;
  std::size_t used = 0;
  while (used < n.size() && errors[used] > 0.0) ++used;
  fit.truncated = used < n.size();
  if (used < 3) throw DomainError("rate_fit: need at least 3 positive errors");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < used; ++i) {
    const double x = std::log(static_cast<double>(n[i]));
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(used);
  const double den = m * sxx - sx * sx;
  if (den == 0.0) throw DomainError("rate_fit: n values must differ");
  fit.slope = (m * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.used = used;
  return fit;
}

RateSeries maurey_rate(const RidgeCombination& representation, const QuadraturePtr& quadrature,
                       const std::vector<int>& ns, const std::vector<std::uint64_t>& seeds,
                       double atom_norm_bound) {
  if (seeds.empty()) throw DomainError("maurey_rate: need at least one seed");
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] <= ns[i - 1]) throw DomainError("maurey_rate: n values must increase");
  }
  const RealFunction f = synth(representation, quadrature);
  const double mass = representation.mass();
  RateSeries out;
  for (int n : ns) {
    std::vector<double> errs;
    errs.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
      errs.push_back(norm_l2(f - synth(maurey_sample(representation, n, seed), quadrature)));
    }
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= static_cast<double>(errs.size());
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean);
    const double sd = errs.size() > 1 ? std::sqrt(var / static_cast<double>(errs.size() - 1)) : 0.0;
    out.n.push_back(n);
    out.mean_error.push_back(mean);
    out.std_error.push_back(sd);
    out.bound.push_back(atom_norm_bound * mass / std::sqrt(static_cast<double>(n)));
  }
  if (ns.size() >= 3) {
    const RateFit fit = rate_fit(out.n, out.mean_error);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.truncated = fit.truncated;
  }
  return out;
}

GreedyResult orthogonal_greedy(const RealFunction& f, const DictionaryConfig& config, int n,
                               int refine_steps) {
  if (n < 1) throw DomainError("orthogonal_greedy: n must be positive");
  config.validate();
  const Quadrature& quad = *f.quadrature;
  detail::WeightedAtoms<RidgeAtom> wa(quad, config, nullptr);
  const auto grid = ridge_grid(config);
  Eigen::MatrixXd grid_cols(quad.size(), static_cast<Index>(grid.size()));
  Eigen::VectorXd norms(static_cast<Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid_cols.col(static_cast<Index>(i)) = wa.column(grid[i]);
    norms[static_cast<Index>(i)] = grid_cols.col(static_cast<Index>(i)).norm();
  }
  const double max_norm = norms.maxCoeff();
  const Eigen::VectorXd y = wa.weighted(f.values);

  GreedyResult out;
  Eigen::MatrixXd cols(y.size(), 0);
  Eigen::VectorXd r = y;
  Eigen::VectorXd c;
  for (int step = 0; step < n; ++step) {
    const Eigen::VectorXd corr = grid_cols.transpose() * r;
    Index best = -1;
    double best_val = -1.0;
    for (Index j = 0; j < corr.size(); ++j) {
      if (norms[j] <= 1e-12 * max_norm) continue;
      const double v = std::abs(corr[j]) / norms[j];
      if (v > best_val) {
        best_val = v;
        best = j;
      }
    }
    if (best < 0 || r.norm() == 0.0) {
      out.errors.push_back(r.norm());
      continue;
    }
    const RidgeAtom atom = detail::refine_atom(grid[static_cast<std::size_t>(best)], wa, r,
                                               detail::Criterion::Normalized, refine_steps, nullptr);
    out.combination.atoms.push_back(atom);
    cols.conservativeResize(Eigen::NoChange, cols.cols() + 1);
    cols.col(cols.cols() - 1) = wa.column(atom);
    Eigen::MatrixXd gram = cols.transpose() * cols;
    const double reg = 1e-12 * gram.trace();
    gram.diagonal().array() += reg;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) throw DomainError("orthogonal_greedy: Gram solve failed");
    c = ldlt.solve(cols.transpose() * y);
    if (!c.allFinite()) throw DomainError("orthogonal_greedy: Gram solve failed");
    r = y - cols * c;
    out.errors.push_back(r.norm());
  }
  out.combination.coefficients.assign(c.data(), c.data() + c.size());
  return out;
}

std::string rate_series_csv(const RateSeries& series) {
  std::ostringstream os;
  os << "n,mean_error,std_error,bound,slope\n";
  for (std::size_t i = 0; i < series.n.size(); ++i) {
    os << series.n[i] << ',' << format_double(series.mean_error[i]) << ','
       << format_double(series.std_error[i]) << ',' << format_double(series.bound[i]) << ','
       << format_double(series.slope) << '\n';
  }
  return os.str();
}

Eigen::VectorXd random_direction(int dim, CounterRng& rng) {
  if (dim < 1) throw DomainError("random_direction: dim must be positive");
  Eigen::VectorXd w(dim);
  do {
    for (int i = 0; i < dim; ++i) w[i] = rng.normal();
  } while (w.norm() < 1e-12);
  return w / w.norm();
}

RidgeCombination random_ridge_combination(const DictionaryConfig& config, int atoms, std::uint64_t seed) {
  if (atoms < 1) throw DomainError("random_ridge_combination: need at least one atom");
  CounterRng rng(seed);
  RidgeCombination out;
  for (int i = 0; i < atoms; ++i) {
    RidgeAtom a;
    a.k = config.k;
    a.omega = random_direction(config.domain.dim(), rng);
    a.b = config.c1 + (config.c2 - config.c1) * rng.uniform();
    out.push(a, rng.normal());
  }
  return out;
}

BarronAtom random_barron_atom(int dim, CounterRng& rng, double beta_lo, double beta_hi) {
  BarronAtom a;
  const double scale = std::exp(2.0 * rng.uniform() - 1.0);
  a.omega = scale * random_direction(dim, rng) * std::sqrt(static_cast<double>(dim));
  for (int i = 0; i < dim; ++i) a.omega[i] *= 0.5 + rng.uniform();
  a.b = a.omega.norm() * (beta_lo + (beta_hi - beta_lo) * rng.uniform());
  return a;
}

}  // namespace varspace
