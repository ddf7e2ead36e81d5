#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varspace/combination.hpp"
#include "varspace/varnorm.hpp"

namespace varspace {

/// Counter-based generator: draw i of stream `seed` is splitmix64(seed, i).
/// The sequence depends only on (seed, counter), not on the platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller (consumes two draws).
  double normal();
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// n i.i.d. draws from the law |a_i|/M, each carrying weight sign(a_i) M / n.
/// The output always has mass exactly M (up to rounding). Throws on M = 0.
template <typename AtomT, typename Scalar>
SparseCombination<AtomT, Scalar> maurey_sample(const SparseCombination<AtomT, Scalar>& representation,
                                               int n, std::uint64_t seed);

struct RateSeries {
  std::vector<int> n;
  std::vector<double> mean_error;
  std::vector<double> std_error;
  std::vector<double> bound;  ///< K_D M n^{-1/2}
  double slope = 0.0;
  double intercept = 0.0;
  bool truncated = false;     ///< a zero error cut the fit short
};

/// Mean and standard deviation over seeds of ||f - f_n||, f_n = maurey_sample.
RateSeries maurey_rate(const RidgeCombination& representation, const QuadraturePtr& quadrature,
                       const std::vector<int>& ns, const std::vector<std::uint64_t>& seeds,
                       double atom_norm_bound);

struct GreedyResult {
  RidgeCombination combination;
  std::vector<double> errors;  ///< L2 error after each step
};

/// Orthogonal greedy: select the grid atom (locally refined) with largest
/// normalized correlation with the residual, then project f onto the span of
/// all selected atoms through regularized normal equations.
GreedyResult orthogonal_greedy(const RealFunction& f, const DictionaryConfig& config, int n,
                               int refine_steps = 20);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool truncated = false;
  std::size_t used = 0;
};

/// Least-squares slope of log(error) against log(n). A zero error ends the
/// fit at the preceding point and sets `truncated`. Needs 3 usable points.
RateFit rate_fit(const std::vector<int>& n, const std::vector<double>& errors);

/// Columns n, mean_error, std_error, bound, slope (the fitted slope repeated).
std::string rate_series_csv(const RateSeries& series);

/// Uniform on S^{d-1} via normalized Gaussian draws.
Eigen::VectorXd random_direction(int dim, CounterRng& rng);

/// `atoms` ridge atoms of order config.k with uniform directions, offsets
/// uniform in [c1, c2] and standard normal weights.
RidgeCombination random_ridge_combination(const DictionaryConfig& config, int atoms, std::uint64_t seed);

/// omega with Gaussian entries at a random log-scale in [e^-1, e], and
/// b = |omega|_2 * beta with beta uniform in [beta_lo, beta_hi].
BarronAtom random_barron_atom(int dim, CounterRng& rng, double beta_lo, double beta_hi);

}  // namespace varspace
