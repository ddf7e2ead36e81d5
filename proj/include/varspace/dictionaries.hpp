#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "varspace/domain.hpp"

namespace varspace {

/// sigma_k(t) = max(0, t)^k. For k = 0 this is the Heaviside step with
/// sigma_0(0) = 1.
inline double relu_power(double t, int k) {
  if (t < 0.0) return 0.0;
  if (k == 0) return 1.0;
  double r = t;
  for (int i = 1; i < k; ++i) r *= t;
  return r;
}

inline double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

/// sigma_k(omega.x + b) with omega on the unit sphere.
struct RidgeAtom {
  int k = 1;
  Eigen::VectorXd omega;
  double b = 0.0;
};

/// (1 + |xi|)^{-s} exp(2 pi i xi.x).
struct SpectralAtom {
  double s = 0.0;
  Eigen::VectorXd xi;
};

/// (|omega|_1 + |b|)^{-1} sigma_1(omega.x + b), omega unnormalized.
struct BarronAtom {
  Eigen::VectorXd omega;
  double b = 0.0;
};

using Atom = std::variant<RidgeAtom, SpectralAtom, BarronAtom>;

Eigen::VectorXd eval_ridge(const RidgeAtom& atom, const Points& x);
Eigen::VectorXcd eval_spectral(const SpectralAtom& atom, const Points& x);
Eigen::VectorXd eval_barron(const BarronAtom& atom, const Points& x);

/// act(omega.x + b) for an arbitrary scalar activation.
Eigen::VectorXd eval_activation(const std::function<double(double)>& act,
                                const Eigen::VectorXd& omega, double b, const Points& x);

// Overload set used by the generic solvers.
inline Eigen::VectorXd eval_atom(const RidgeAtom& a, const Points& x) { return eval_ridge(a, x); }
inline Eigen::VectorXcd eval_atom(const SpectralAtom& a, const Points& x) { return eval_spectral(a, x); }
inline Eigen::VectorXd eval_atom(const BarronAtom& a, const Points& x) { return eval_barron(a, x); }

enum class Family { Ridge, Spectral, Barron };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// Parameter discretization. Ridge/Barron families use `directions` points on
/// S^{d-1} (antipodally closed) and `offsets` equispaced b values in [c1, c2];
/// the spectral family uses the lattice step*Z^d cut to |xi| <= lattice_radius.
struct GridSpec {
  int directions = 16;
  int offsets = 33;
  double lattice_step = 0.25;
  double lattice_radius = 4.0;
};

struct DictionaryConfig {
  Family family = Family::Ridge;
  BoxDomain domain = BoxDomain::cube(1, -1.0, 1.0);
  int k = 1;
  double c1 = -2.0;
  double c2 = 2.0;
  double s = 0.0;
  GridSpec grid;

  /// Throws DomainError if the offsets or grid are unusable.
  void validate() const;
};

struct OffsetCheck {
  bool ok = false;
  double inf_dot = 0.0;       ///< inf of x.omega over the domain and the sphere
  double sup_dot = 0.0;
  double lower_margin = 0.0;  ///< inf_dot - c1, must be > 0
  double upper_margin = 0.0;  ///< c2 - sup_dot, must be > 0
};

OffsetCheck validate_offsets(const BoxDomain& domain, double c1, double c2);

/// `count` unit vectors in R^d containing -w for every w. d = 1 always yields
/// {+1, -1}; d = 2 is equiangular; d = 3 uses a Fibonacci spiral on one
/// hemisphere-worth of points plus negations; d >= 4 uses Halton points pushed
/// through the Gaussian map.
std::vector<Eigen::VectorXd> sphere_directions(int dim, int count);

std::vector<RidgeAtom> ridge_grid(const DictionaryConfig& config);
std::vector<SpectralAtom> spectral_grid(const DictionaryConfig& config);
std::vector<BarronAtom> barron_grid(const DictionaryConfig& config);
std::vector<Atom> grid_atoms(const DictionaryConfig& config);

/// Largest L2 norm over the configured grid, no safety factor.
double atom_norm_sup(const DictionaryConfig& config, const Quadrature& quadrature);

inline constexpr double kAtomNormSafety = 1.05;

/// K_D estimate: atom_norm_sup times kAtomNormSafety.
double atom_norm_bound(const DictionaryConfig& config, const Quadrature& quadrature);

/// Gram matrix [<a_i, a_j>] for atom values stored column-wise on the nodes.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& atom_values, const Quadrature& quadrature);

/// Count of Gram eigenvalues above tolerance * largest.
int gram_rank(const Eigen::MatrixXd& atom_values, const Quadrature& quadrature, double tolerance);
int gram_rank(const std::vector<RidgeAtom>& atoms, const Quadrature& quadrature, double tolerance);

/// ||sigma_0(x_1) - logistic(r x_1)||_{L2} for every r.
std::vector<double> sigmoid_heaviside_limit(const std::vector<double>& rs,
                                            const QuadraturePtr& quadrature);

}  // namespace varspace
