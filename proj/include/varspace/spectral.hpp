#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "varspace/varnorm.hpp"

namespace varspace {

/// f and its transform fhat(xi) = int f(x) exp(-2 pi i xi.x) dx on R^d.
/// `envelope(r)` bounds |fhat(xi)| for |xi| >= r and must be nonincreasing
/// beyond `envelope_radius`. The weighted tail int (1+|xi|)^s envelope is
/// finite only for s < `critical_s`.
struct FourierPair {
  std::string name;
  int dim = 1;
  std::function<Complex(const Eigen::VectorXd&)> spatial;
  std::function<Complex(const Eigen::VectorXd&)> transform;
  std::function<double(double)> envelope;
  double envelope_radius = 0.0;
  double critical_s = std::numeric_limits<double>::infinity();
};

/// exp(-|x|^2 / (2 a)) on R^d, d <= 2; fhat = (2 pi a)^{d/2} exp(-2 pi^2 a |xi|^2).
FourierPair gaussian_pair(int dim, double a = 1.0);
/// 1/(1 + x^2) on R; fhat = pi exp(-2 pi |xi|).
FourierPair cauchy_pair();
/// max(0, 1 - |x|) on R; fhat = sinc^2(xi). Tail integrable only for s < 1.
FourierPair hat_pair();
/// name in {gaussian, cauchy, hat}; `a` is the gaussian width.
FourierPair builtin_pair(const std::string& name, int dim, double a = 1.0);

/// max over `points` random points of the box of
/// |f(x) - int_{|xi| <= r_max} fhat(xi) exp(2 pi i xi.x) dxi|.
double inversion_error(const FourierPair& pair, const BoxDomain& domain, double r_max, int level,
                       std::uint64_t seed = 1, int points = 5);

/// Tail bound int_{|xi| > r} (1+|xi|)^s envelope(|xi|) dxi. Infinite when
/// s >= critical_s.
double envelope_tail(const FourierPair& pair, double s, double r);

struct SpectralValue {
  double head = 0.0;  ///< quadrature over |xi| <= r_max
  double tail = 0.0;  ///< envelope bound beyond r_max
  double value() const { return head + tail; }
};

/// int (1+|xi|)^s |fhat(xi)| dxi over the ball of radius r_max (composite
/// Gauss with `level` 16-point panels per unit radius; polar for d = 2) with
/// the envelope tail reported separately. Throws DomainError if the tail
/// exceeds 1e-6 of the head or is infinite.
SpectralValue spectral_barron_norm(const FourierPair& pair, double s, double r_max, int level = 8);

/// int (1+|xi|)^s |ghat_R(xi)| dxi for g_R(x) = exp(-x^2 / (2R)), whose
/// transform is sqrt(2 pi R) exp(-2 pi^2 R xi^2).
double gaussian_factor_integral(double R, double s);

struct CutoffReport {
  double R = 0.0;
  double s = 0.0;
  double L = 0.0;
  int k = 0;
  double gaussian_integral = 0.0;
  double correction_integral = 0.0;
  double total = 0.0;
  double on_domain_max_error = 0.0;
  double tail_bound = 0.0;  ///< part of correction_integral beyond the xi cutoff
};

/// phi_R = g_R + tau_R with tau_R = 1 - g_R on [-L, L] and, for x > L, the
/// degree-k Taylor polynomial of 1 - g_R at L times a C-infinity step that is
/// flat at L and vanishes from L + 1 on (mirrored for x < -L). tau_R is C^k.
/// Requires k > s + 2. Throws DomainError if the transform quadrature does
/// not settle under panel halving.
CutoffReport build_cutoff(double R, double s, double L, int k);

/// The cutoff profile itself, for inspection.
double cutoff_tau(double R, double L, int k, double x);

std::string cutoff_csv(const std::vector<CutoffReport>& rows);

struct EqualityRow {
  std::string name;
  double s = 0.0;
  double upper = 0.0;
  double residual = 0.0;
  double spectral = 0.0;
  double tail = 0.0;
  double gap = 0.0;        ///< upper - spectral
  bool success = false;    ///< solver met its tolerance
  bool passed = false;     ///< upper <= spectral * (1 + slack)
  std::string status;
};

/// variation_upper over the F_s grid of f restricted to the domain against
/// the spectral value of the supplied global extension.
EqualityRow fs_equality_experiment(const FourierPair& pair, const DictionaryConfig& config, int level,
                                   double r_max, const SolverOptions& options = {},
                                   double slack = 0.1);

std::string equality_csv(const std::vector<EqualityRow>& rows);

}  // namespace varspace
