#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "varspace/combination.hpp"
#include "varspace/varnorm.hpp"

namespace varspace {

/// Piecewise polynomial on [-1, 1]. Piece i lives on [t_{i-1}, t_i) with
/// t_{-1} = -1 and t_n = 1; coefficients are ascending powers of x.
/// Evaluation is right-continuous, so a jump at t belongs to the right piece.
struct PiecewisePolynomial {
  std::vector<double> breakpoints;
  std::vector<Eigen::VectorXd> pieces;

  int degree() const;
  std::size_t piece_index(double x) const;
  double operator()(double x) const;
  PiecewisePolynomial derivative() const;
  /// Validates breakpoints and piece count; throws DomainError.
  void check(int max_degree) const;
};

/// f together with derivative callables: derivatives[j] = f^{(j)}.
struct SmoothProfile {
  std::vector<std::function<double(double)>> derivatives;
  int order() const { return static_cast<int>(derivatives.size()) - 1; }
};

/// A function on [-1, 1] given either exactly as a piecewise polynomial or as
/// a smooth callable with derivatives.
class ProfileFunction {
 public:
  /// Breakpoints must be strictly increasing inside (-1, 1).
  static ProfileFunction piecewise(std::string id, PiecewisePolynomial p, int max_degree = 16);
  /// Spot-checks each supplied derivative against a central difference of the
  /// previous one (1e-4 relative) and throws DomainError on disagreement.
  static ProfileFunction smooth(std::string id, std::vector<std::function<double(double)>> derivatives);

  const std::string& id() const { return id_; }
  bool is_piecewise() const { return std::holds_alternative<PiecewisePolynomial>(rep_); }
  const PiecewisePolynomial& as_piecewise() const;
  const SmoothProfile& as_smooth() const;
  /// Highest available derivative (unbounded for piecewise polynomials).
  int order() const;

  double operator()(double x) const { return derivative_value(0, x); }
  double derivative_value(int j, double x) const;
  /// The j-th derivative as a profile of its own.
  ProfileFunction derivative(int j) const;

 private:
  ProfileFunction() = default;
  std::string id_;
  std::variant<PiecewisePolynomial, SmoothProfile> rep_;
};

/// |g(-1)| + TV(g) on [-1, 1]. Exact for piecewise polynomials (critical
/// points from companion eigenvalues, plus jumps); adaptive sampling for
/// smooth profiles. Throws DomainError if 20 doublings do not converge.
double bv_norm(const ProfileFunction& g);

/// Sum over sampled increments on a uniform grid, doubled until successive
/// values agree to `relative_tolerance`.
double total_variation_adaptive(const std::function<double(double)>& g,
                                double relative_tolerance = 1e-6, int max_doublings = 20);

/// sum_{j<k} |f^{(j)}(-1)| + bv_norm(f^{(k)}).
double characterization_norm(const ProfileFunction& f, int k);

struct PeanoResult {
  RidgeCombination combination;
  double boundary_mass = 0.0;
  double kernel_mass = 0.0;
  double constant = 0.0;               ///< C with mass <= C * characterization_norm
  double characterization = 0.0;
  double residual = 0.0;               ///< L2 distance on the supplied quadrature
  double vandermonde_condition = 0.0;
  std::vector<double> boundary_offsets;
  double mass() const { return boundary_mass + kernel_mass; }
};

/// Constant of the boundary re-expansion: with M_{ji} = C(k,j)(b_i - 1)^{k-j},
/// ||M^{-1}||_1 bounds the atom mass of a Taylor polynomial by its l1
/// coefficient size. The returned C is max(that, 1).
double peano_constant(int k, double c2);

/// Offsets b_i equispaced in [1 + delta, c2], delta = (c2 - 1)/10.
std::vector<double> peano_offsets(int k, double c2);

/// Exact-on-nodes P_k representation of f on [-1, 1]:
///   f(x) = sum_{j<=k} f^{(j)}(-1)/j! (x+1)^j + int f^{(k+1)}(b)/k! sigma_k(x-b) db.
/// The Taylor part is re-expanded in sigma_k(x + b_i); the kernel integral uses
/// composite Gauss with panels split at the quadrature nodes. Piecewise
/// polynomials of degree <= k with C^{k-1} joints get one atom per breakpoint.
/// Throws DomainError for c2 <= 1, c1 > -1 or a Vandermonde condition above 1e12.
PeanoResult peano_synthesis(const ProfileFunction& f, int k, const QuadraturePtr& quadrature,
                            double c1, double c2, int panel_order = 8);

struct EquivalenceRow {
  std::string id;
  int k = 0;
  double characterization = 0.0;
  double upper = 0.0;
  double ratio = 0.0;
  double refined_upper = 0.0;
  double refinement_ratio = 0.0;  ///< ratio at doubled level over ratio
  bool success = false;
  bool in_window = false;
  std::string status;
};

struct EquivalenceOptions {
  int level = 32;
  double window = 10.0;  ///< ratios must lie in [1/window, window]
  double c1 = -2.0;
  double c2 = 2.0;
  GridSpec grid{2, 65, 0.25, 4.0};
  SolverOptions solver;
};

struct EquivalenceCase {
  ProfileFunction f;
  int k = 1;
};

/// variation_upper against characterization_norm for each case, at `level`
/// and 2 * level. Solver failures flag the row instead of throwing.
std::vector<EquivalenceRow> equivalence_experiment(const std::vector<EquivalenceCase>& suite,
                                                   const EquivalenceOptions& options = {});

/// relu1, x, x2, exp, log2px, pwl3 at k = 1 and relu2, x, cubic, exp, log2px,
/// pwq3 at k = 2.
std::vector<EquivalenceCase> default_equivalence_suite();

/// Columns function_id, k, characterization_norm, variation_upper, ratio, refinement_ratio.
std::string equivalence_csv(const std::vector<EquivalenceRow>& rows);

/// Built-in profiles: relu1, relu2, x, x2, cubic, exp, log2px, pwl3, pwq3,
/// heaviside. Throws DomainError on an unknown id.
ProfileFunction builtin_profile(const std::string& id);
std::vector<std::string> builtin_profile_ids();

}  // namespace varspace
