#pragma once

#include <string>
#include <vector>

#include "varspace/combination.hpp"
#include "varspace/dictionaries.hpp"
#include "varspace/domain.hpp"

namespace varspace {

/// Knobs for the conditional-gradient / l1 re-fit solver. Defaults follow the
/// documented schedule: lambda starts at 0.1 ||f|| and halves down to 1e-10.
struct SolverOptions {
  double epsilon = 0.0;             ///< residual tolerance; <= 0 means relative_epsilon * ||f||
  double relative_epsilon = 1e-3;
  int max_atoms = 200;
  int max_iterations = 400;
  double lambda_start = 0.1;        ///< times ||f||
  double lambda_decay = 0.5;
  double lambda_floor = 1e-10;
  int refine_steps = 20;
  int refine_candidates = 16;       ///< best grid atoms refined per selection
  int slide_iterations = 30;        ///< joint Levenberg-Marquardt steps on active atom parameters
  int slide_sweeps = 2;             ///< coordinate passes over active atom parameters after that
  int polish_steps = 8;             ///< log-bisection steps on lambda once feasible
  int max_sweeps = 4000;
  double cd_tolerance = 1e-11;
  int stall_iterations = 10;        ///< stop once the feasible mass stops improving for this many iterations
  bool kkt_continuation = true;     ///< keep adding atoms that violate optimality once feasible
  double kkt_slack = 2e-3;
};

struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;
  double mass = 0.0;
  int atoms = 0;
};

/// Bracket on the variation norm produced by one solve.
struct EstimateReport {
  double upper = 0.0;     ///< l1 mass of the returned combination
  double residual = 0.0;  ///< L2 distance between its synthesis and f
  double lower = 0.0;     ///< (|<f, r>| - epsilon ||r||) / sup_h |<h, r>| with r the final residual
  double epsilon = 0.0;
  double lambda = 0.0;    ///< penalty at which the returned solution was computed
  int iterations = 0;
  int atom_count = 0;
  double wall_seconds = 0.0;
  bool success = false;   ///< residual <= epsilon; otherwise `upper` is not a gauge bound
  std::string status;
  std::vector<IterationRecord> history;
};

template <typename AtomT>
struct UpperResult {
  EstimateReport report;
  SparseCombination<AtomT> combination;
};

/// Upper bound on ||f||_D: the smallest l1 mass the solver finds among
/// combinations within epsilon of f in L2.
///
/// Each iteration picks the grid atom most correlated with the current
/// residual, polishes its continuous parameters by coordinate search, and
/// re-fits all weights with cyclic soft-thresholding along a geometric lambda
/// path, then slides the active atoms' parameters to lower the residual and
/// re-fits. After the residual constraint is first met, atoms that violate the
/// lasso optimality condition keep being added until none remain.
template <typename AtomT>
UpperResult<AtomT> variation_upper(const GridFunction<atom_scalar_t<AtomT>>& f,
                                   const DictionaryConfig& config,
                                   const SolverOptions& options = {});

struct QuotientResult {
  EstimateReport report;
  RidgeCombination combination;
  RealFunction polynomial;  ///< fitted unpenalized polynomial part
};

/// inf over polynomials p of degree <= degree of the variation upper bound of
/// f + p. Polynomial coefficients are unpenalized; reported mass excludes them.
QuotientResult quotient_variation_upper(const RealFunction& f, const DictionaryConfig& config,
                                        int degree, const SolverOptions& options = {});

struct LowerBound {
  double value = 0.0;             ///< |<f, g>| / sup
  double sup = 0.0;               ///< max over refined grid atoms of |<h, g>|
  double refinement_delta = 0.0;  ///< sup gained by local refinement over the raw grid max
};

/// Gauge duality lower bound (|<f, g>| - epsilon ||g||) / sup_h |<h, g>|.
/// With epsilon > 0 it bounds the smallest mass within epsilon of f, which is
/// the quantity variation_upper estimates. Only as good as the grid's
/// coverage of sup_h |<h, g>|; see refinement_delta.
template <typename AtomT>
LowerBound variation_lower(const GridFunction<atom_scalar_t<AtomT>>& f,
                           const DictionaryConfig& config,
                           const GridFunction<atom_scalar_t<AtomT>>& certificate,
                           int refine_steps = 20, double epsilon = 0.0);

/// Multi-indices of total degree <= degree in `dim` variables, graded order.
std::vector<Eigen::VectorXi> monomial_exponents(int dim, int degree);

/// Columns are the monomials evaluated at the points.
Eigen::MatrixXd monomial_matrix(const Points& x, const std::vector<Eigen::VectorXi>& exponents);

/// Weighted least-squares fit of f by polynomials of degree <= degree.
/// Returns the coefficients in monomial_exponents order.
Eigen::VectorXd polynomial_fit(const RealFunction& f, int degree);

struct RadonSynthesis {
  RealFunction total;        ///< (1/k!) sum a_i [sigma_k(w.x+b) - (w.x+b)^k]
  RealFunction in_range;     ///< contribution of atoms with b in [c1, c2]
  RealFunction polynomial;   ///< contribution of atoms with b outside [c1, c2]
  Eigen::VectorXd polynomial_coefficients;  ///< exact monomial expansion of `polynomial`
  RidgeCombination in_range_measure;        ///< the in-range atoms with weights a_i / k!
  std::vector<Eigen::VectorXi> exponents;
};

/// Evaluates a finite measure on S^{d-1} x R against the kernel
/// sigma_k(w.x+b) - (w.x+b)^k / k!, split by whether b lies in [c1, c2].
/// Atoms with b outside [c1, c2] are polynomials on the domain; their sum is
/// returned both sampled and as monomial coefficients.
RadonSynthesis radon_style_synthesis(const RidgeCombination& measure, int k, double c1, double c2,
                                     const QuadraturePtr& quadrature);

struct ConverseCheck {
  double bound = 0.0;      ///< M
  double upper = 0.0;      ///< variation_upper of the limit
  double final_distance = 0.0;
  bool passed = false;
};

/// Converse of the sampling rate: if combinations of mass <= M converge to f,
/// then ||f||_D <= M. Verifies the masses, checks the sequence approaches f,
/// and confirms variation_upper(f) <= M (1 + slack).
/// Throws DomainError for a non-convergent sequence or a mass above M.
template <typename AtomT>
ConverseCheck converse_maurey_check(const std::vector<SparseCombination<AtomT>>& sequence,
                                    const GridFunction<atom_scalar_t<AtomT>>& limit, double bound,
                                    const DictionaryConfig& config,
                                    const SolverOptions& options = {}, double slack = 0.05);

}  // namespace varspace
