#pragma once

// Shared internals of the atom-selection solvers: parameter perturbation per
// atom family, sqrt-weighted atom columns, and local coordinate search.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "varspace/combination.hpp"
#include "varspace/dictionaries.hpp"

namespace varspace::detail {

// ---------------------------------------------------------------------------
// Continuous parameters of each atom family, for local coordinate search.

template <typename AtomT>
struct Params;

template <>
struct Params<RidgeAtom> {
  static int count(const DictionaryConfig& cfg) {
    const int d = cfg.domain.dim();
    if (d == 1) return 1;
    if (d == 2) return 2;
    return d + 1;
  }
  static double spacing(const DictionaryConfig& cfg, int p) {
    const int d = cfg.domain.dim();
    const double db = cfg.grid.offsets > 1 ? (cfg.c2 - cfg.c1) / (cfg.grid.offsets - 1)
                                           : (cfg.c2 - cfg.c1);
    if (p == count(cfg) - 1) return db;
    const int ndir = std::max(2, cfg.grid.directions);
    if (d == 2) return 2.0 * std::numbers::pi / ndir;
    return std::sqrt(4.0 * std::numbers::pi / ndir);
  }
  static RidgeAtom perturb(const RidgeAtom& a, int p, double delta, const DictionaryConfig& cfg) {
    RidgeAtom out = a;
    const int d = cfg.domain.dim();
    if (p == count(cfg) - 1) {
      out.b = std::clamp(a.b + delta, cfg.c1, cfg.c2);
      return out;
    }
    if (d == 2) {
      const double c = std::cos(delta);
      const double s = std::sin(delta);
      out.omega[0] = c * a.omega[0] - s * a.omega[1];
      out.omega[1] = s * a.omega[0] + c * a.omega[1];
      out.omega.normalize();
      return out;
    }
    out.omega[p] += delta;
    const double n = out.omega.norm();
    if (n == 0.0) return a;
    out.omega /= n;
    return out;
  }
  static bool same(const RidgeAtom& a, const RidgeAtom& b) {
    return a.k == b.k && std::abs(a.b - b.b) < 1e-12 && (a.omega - b.omega).norm() < 1e-12;
  }
};

template <>
struct Params<SpectralAtom> {
  static int count(const DictionaryConfig& cfg) { return cfg.domain.dim(); }
  static double spacing(const DictionaryConfig& cfg, int) { return cfg.grid.lattice_step; }
  static SpectralAtom perturb(const SpectralAtom& a, int p, double delta,
                              const DictionaryConfig& cfg) {
    SpectralAtom out = a;
    out.xi[p] += delta;
    const double n = out.xi.norm();
    if (n > cfg.grid.lattice_radius && n > 0.0) out.xi *= cfg.grid.lattice_radius / n;
    return out;
  }
  static bool same(const SpectralAtom& a, const SpectralAtom& b) {
    return (a.xi - b.xi).norm() < 1e-12 && a.s == b.s;
  }
};

template <>
struct Params<BarronAtom> {
  static int count(const DictionaryConfig& cfg) { return cfg.domain.dim() + 1; }
  static double spacing(const DictionaryConfig& cfg, int p) {
    if (p == count(cfg) - 1) {
      return cfg.grid.offsets > 1 ? (cfg.c2 - cfg.c1) / (cfg.grid.offsets - 1) : 1.0;
    }
    return std::sqrt(4.0 * std::numbers::pi / std::max(2, cfg.grid.directions));
  }
  static BarronAtom perturb(const BarronAtom& a, int p, double delta, const DictionaryConfig& cfg) {
    BarronAtom out = a;
    if (p == count(cfg) - 1) {
      out.b += delta;
    } else {
      out.omega[p] += delta;
    }
    if (out.omega.isZero() && out.b == 0.0) return a;
    return out;
  }
  static bool same(const BarronAtom& a, const BarronAtom& b) {
    return std::abs(a.b - b.b) < 1e-12 && (a.omega - b.omega).norm() < 1e-12;
  }
};

template <typename AtomT>
std::vector<AtomT> family_grid(const DictionaryConfig& cfg);
template <>
inline std::vector<RidgeAtom> family_grid<RidgeAtom>(const DictionaryConfig& cfg) { return ridge_grid(cfg); }
template <>
inline std::vector<SpectralAtom> family_grid<SpectralAtom>(const DictionaryConfig& cfg) { return spectral_grid(cfg); }
template <>
inline std::vector<BarronAtom> family_grid<BarronAtom>(const DictionaryConfig& cfg) { return barron_grid(cfg); }

// ---------------------------------------------------------------------------
// Atoms mapped into the weighted Euclidean picture: column = sqrt(w) .* atom,
// optionally with a polynomial subspace projected out.

template <typename AtomT>
class WeightedAtoms {
 public:
  using Scalar = atom_scalar_t<AtomT>;
  using Vec = Vector<Scalar>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  WeightedAtoms(const Quadrature& quad, const DictionaryConfig& cfg, const Eigen::MatrixXd* basis)
      : quad_(quad), cfg_(cfg), sqrt_w_(quad.weights().cwiseSqrt()) {
    if (basis) basis_ = basis->template cast<Scalar>();
  }

  Vec column(const AtomT& atom) const {
    Vec v = sqrt_w_.cast<Scalar>().cwiseProduct(eval_atom(atom, quad_.nodes()).template cast<Scalar>());
    return project(v);
  }

  Vec project(const Vec& v) const {
    if (basis_.cols() == 0) return v;
    return v - basis_ * (basis_.adjoint() * v);
  }

  Vec weighted(const Vector<Scalar>& values) const {
    return project(sqrt_w_.cast<Scalar>().cwiseProduct(values));
  }

  const Eigen::VectorXd& sqrt_weights() const { return sqrt_w_; }
  const DictionaryConfig& config() const { return cfg_; }

 private:
  const Quadrature& quad_;
  const DictionaryConfig& cfg_;
  Eigen::VectorXd sqrt_w_;
  Mat basis_;
};

enum class Criterion { Normalized, Raw };

/// Columns with norm at or below `floor` score zero under the normalized
/// criterion; they are numerically in the projected-out subspace.
template <typename AtomT>
double score(const Vector<atom_scalar_t<AtomT>>& col, const Vector<atom_scalar_t<AtomT>>& r,
             Criterion crit, double floor = 0.0) {
  const double c = std::abs(col.dot(r));
  if (crit == Criterion::Raw) return c;
  const double n = col.norm();
  return n > floor ? c / n : 0.0;
}

/// Coordinate search on the continuous parameters of `atom`, maximizing
/// `objective(column)`. Steps start at `scale` times the grid spacing and
/// halve each round.
template <typename AtomT, typename Objective>
AtomT local_search(const AtomT& atom, const WeightedAtoms<AtomT>& wa, const Objective& objective, int steps,
                   double scale, double* best_value) {
  const DictionaryConfig& cfg = wa.config();
  AtomT best = atom;
  double best_val = objective(wa.column(best));
  const int np = Params<AtomT>::count(cfg);
  std::vector<double> h(np);
  for (int p = 0; p < np; ++p) h[p] = scale * Params<AtomT>::spacing(cfg, p);
  for (int step = 0; step < steps; ++step) {
    for (int p = 0; p < np; ++p) {
      for (double sign : {1.0, -1.0}) {
        AtomT cand = Params<AtomT>::perturb(best, p, sign * h[p], cfg);
        const double v = objective(wa.column(cand));
        if (v > best_val) {
          best_val = v;
          best = std::move(cand);
          break;
        }
      }
      h[p] *= 0.5;
    }
  }
  if (best_value) *best_value = best_val;
  return best;
}

/// local_search on the correlation score, from half the grid spacing.
template <typename AtomT>
AtomT refine_atom(const AtomT& atom, const WeightedAtoms<AtomT>& wa,
                  const Vector<atom_scalar_t<AtomT>>& r, Criterion crit, int steps,
                  double* best_score, double floor = 0.0) {
  auto obj = [&](const Vector<atom_scalar_t<AtomT>>& col) { return score<AtomT>(col, r, crit, floor); };
  return local_search(atom, wa, obj, steps, 0.5, best_score);
}

}  // namespace varspace::detail
