#include "varspace/varnorm.hpp"

#include "detail/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <type_traits>

namespace varspace {

using detail::Criterion;
using detail::Params;
using detail::WeightedAtoms;
using detail::family_grid;
using detail::refine_atom;

namespace {

double abs2(double x) { return x * x; }
double abs2(const Complex& z) { return std::norm(z); }
double real_part(double x) { return x; }
double real_part(const Complex& z) { return z.real(); }

// soft(rho, t) = rho * max(0, 1 - t/|rho|); works for real and complex rho
template <typename Scalar>
Scalar soft_threshold(const Scalar& rho, double t) {
  const double m = std::abs(rho);
  if (m <= t) return Scalar{0};
  return rho * ((m - t) / m);
}

// ---------------------------------------------------------------------------
// l1-penalized least squares on the active set:
//   minimize ||B c - y||^2 + lambda ||c||_1
// by cyclic coordinate descent with Gram-matrix updates.

template <typename Scalar>
class LassoSystem {
 public:
  using Vec = Vector<Scalar>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  LassoSystem(const Mat& b, const Vec& y) : b_(b), y_(y) {
    gram_ = b.adjoint() * b;
    z_ = b.adjoint() * y;
    yy_ = y.squaredNorm();
  }

  void solve(double lambda, Vec& c, int max_sweeps, double tol) const {
    if constexpr (std::is_same_v<Scalar, double>) {
      Vec x = c;
      if (feature_sign(lambda, x)) {
        c = x;
        return;
      }
    }
    coordinate_descent(lambda, c, max_sweeps, tol);
  }

  // Feature-sign search (real weights only): solve the equality-constrained
  // problem on the current sign pattern, line-search toward it, then grow the
  // support by the worst optimality violator. Exact up to the linear solves,
  // which matters when columns are nearly collinear and cyclic descent crawls.
  bool feature_sign(double lambda, Eigen::VectorXd& x) const {
    const Index m = gram_.rows();
    if (m == 0) return true;
    const double scale = std::max(z_.cwiseAbs().maxCoeff(), lambda);
    const double reg = 1e-14 * gram_.diagonal().cwiseAbs().maxCoeff();
    auto objective = [&](const Eigen::VectorXd& v) {
      return v.dot(gram_ * v) - 2.0 * z_.dot(v) + lambda * v.lpNorm<1>();
    };
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
    std::vector<Index> act;
    for (Index j = 0; j < m; ++j) {
      if (x[j] != 0.0) {
        act.push_back(j);
        theta[j] = x[j] > 0.0 ? 1.0 : -1.0;
      }
    }
    const int budget = static_cast<int>(20 * m + 50);
    for (int outer = 0; outer < budget; ++outer) {
      bool settled = act.empty();
      for (int inner = 0; inner < budget && !settled; ++inner) {
        const Index a = static_cast<Index>(act.size());
        Eigen::MatrixXd gaa(a, a);
        Eigen::VectorXd rhs(a), xa(a);
        for (Index p = 0; p < a; ++p) {
          for (Index q = 0; q < a; ++q) gaa(p, q) = gram_(act[p], act[q]);
          rhs[p] = z_[act[p]] - 0.5 * lambda * theta[act[p]];
          xa[p] = x[act[p]];
        }
        gaa.diagonal().array() += reg;
        const Eigen::VectorXd xh = gaa.ldlt().solve(rhs);
        if (!xh.allFinite()) return false;
        std::vector<double> ts{1.0};
        for (Index p = 0; p < a; ++p) {
          if (xa[p] != 0.0 && xa[p] * xh[p] < 0.0) ts.push_back(xa[p] / (xa[p] - xh[p]));
        }
        const double before = objective(x);
        double best_t = 1.0, best_obj = std::numeric_limits<double>::infinity();
        Eigen::VectorXd v = x;
        for (double t : ts) {
          for (Index p = 0; p < a; ++p) v[act[p]] = xa[p] + t * (xh[p] - xa[p]);
          const double o = objective(v);
          if (o < best_obj) {
            best_obj = o;
            best_t = t;
          }
        }
        for (Index p = 0; p < a; ++p) {
          const bool crossing = best_t != 1.0 && xa[p] != 0.0 && xa[p] * xh[p] < 0.0 &&
                                xa[p] / (xa[p] - xh[p]) == best_t;
          x[act[p]] = crossing ? 0.0 : xa[p] + best_t * (xh[p] - xa[p]);
        }
        if (best_obj > before + 1e-12 * std::abs(before) + 1e-300) return false;
        std::vector<Index> kept;
        for (Index j : act) {
          if (x[j] != 0.0) {
            kept.push_back(j);
            theta[j] = x[j] > 0.0 ? 1.0 : -1.0;
          } else {
            theta[j] = 0.0;
          }
        }
        act = std::move(kept);
        const Eigen::VectorXd grad = 2.0 * (gram_ * x - z_);
        settled = true;
        for (Index j : act) settled = settled && std::abs(grad[j] + lambda * theta[j]) <= 1e-8 * scale;
      }
      if (!settled) return false;
      const Eigen::VectorXd grad = 2.0 * (gram_ * x - z_);
      Index worst = -1;
      double worst_val = lambda * (1.0 + 1e-9) + 1e-12 * scale;
      for (Index j = 0; j < m; ++j) {
        if (x[j] == 0.0 && std::abs(grad[j]) > worst_val) {
          worst_val = std::abs(grad[j]);
          worst = j;
        }
      }
      if (worst < 0) return true;
      act.push_back(worst);
      theta[worst] = grad[worst] > 0.0 ? -1.0 : 1.0;
    }
    return false;
  }

  void coordinate_descent(double lambda, Vec& c, int max_sweeps, double tol) const {
    const Index m = gram_.rows();
    Vec gc = gram_ * c;
    const double t = 0.5 * lambda;
    const double stop = tol * std::sqrt(yy_);
    bool full = true;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double max_delta = 0.0;
      for (Index j = 0; j < m; ++j) {
        if (!full && c[j] == Scalar{0}) continue;
        const double gjj = real_part(gram_(j, j));
        if (gjj <= 0.0) continue;
        const Scalar rho = z_[j] - (gc[j] - gram_(j, j) * c[j]);
        const Scalar cj = soft_threshold(rho, t) / gjj;
        const Scalar delta = cj - c[j];
        if (delta != Scalar{0}) {
          gc += gram_.col(j) * delta;
          c[j] = cj;
          max_delta = std::max(max_delta, abs2(delta) * gjj);
        }
      }
      const bool converged = std::sqrt(max_delta) <= stop;
      if (converged) {
        if (full) break;
        full = true;
      } else {
        full = false;
      }
    }
  }

  double residual(const Vec& c) const { return (b_ * c - y_).norm(); }

  Vec least_squares() const {
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(b_);
    return cod.solve(y_);
  }

 private:
  const Mat& b_;
  const Vec& y_;
  Mat gram_;
  Vec z_;
  double yy_ = 0.0;
};

template <typename Scalar>
double l1(const Vector<Scalar>& c) {
  double m = 0.0;
  for (Index i = 0; i < c.size(); ++i) m += std::abs(c[i]);
  return m;
}

template <typename AtomT>
class Solver {
 public:
  using Scalar = atom_scalar_t<AtomT>;
  using Vec = Vector<Scalar>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Solver(const GridFunction<Scalar>& f, const DictionaryConfig& cfg, const SolverOptions& opt,
         const Eigen::MatrixXd* basis)
      : f_(f), cfg_(cfg), opt_(opt), wa_(*f.quadrature, cfg, basis) {
    cfg_.validate();
    grid_ = family_grid<AtomT>(cfg_);
    const Index n = f.quadrature->size();
    grid_cols_.resize(n, static_cast<Index>(grid_.size()));
    grid_norms_.resize(static_cast<Index>(grid_.size()));
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      grid_cols_.col(static_cast<Index>(i)) = wa_.column(grid_[i]);
      grid_norms_[static_cast<Index>(i)] = grid_cols_.col(static_cast<Index>(i)).norm();
    }
    y_ = wa_.weighted(f.values);
    norm_floor_ = grid_norms_.size() ? 1e-8 * grid_norms_.maxCoeff() : 0.0;
  }

  UpperResult<AtomT> run() {
    const auto t0 = std::chrono::steady_clock::now();
    UpperResult<AtomT> out;
    EstimateReport& rep = out.report;
    const double fnorm = y_.norm();
    const double eps = opt_.epsilon > 0.0 ? opt_.epsilon : opt_.relative_epsilon * fnorm;
    rep.epsilon = eps;
    eps_ = eps;

    std::vector<AtomT> active;
    Mat cols(y_.size(), 0);
    Vec c;
    Vec r = y_;
    bool feasible = fnorm <= eps;
    double lambda = 0.0;
    int lambda_index = -1;
    const double lambda0 = opt_.lambda_start * fnorm;
    std::string status = feasible ? "converged" : "budget_exhausted";

    double best_mass = std::numeric_limits<double>::infinity();
    int stalled = 0;
    int it = 0;
    for (; !feasible || opt_.kkt_continuation; ++it) {
      if (it >= opt_.max_iterations || static_cast<int>(active.size()) >= opt_.max_atoms) break;
      if (fnorm == 0.0) break;
      const Criterion crit = feasible ? Criterion::Raw : Criterion::Normalized;

      // (i) grid scan, (ii) local refinement of the best few grid atoms
      const Vec corr = grid_cols_.adjoint() * r;
      Eigen::VectorXd scores(corr.size());
      for (Index j = 0; j < corr.size(); ++j) {
        scores[j] = grid_norms_[j] <= norm_floor_ ? -1.0
                    : crit == Criterion::Raw        ? std::abs(corr[j])
                                                    : std::abs(corr[j]) / grid_norms_[j];
      }
      double refined_val = -1.0;
      AtomT cand;
      if (!best_refined(scores, r, crit, cand, refined_val)) {
        status = "empty_grid";
        break;
      }
      if (feasible) {
        // optimality: |2 <a, r>| <= lambda for every atom
        if (2.0 * refined_val <= lambda * (1.0 + opt_.kkt_slack)) {
          status = "converged";
          break;
        }
      }
      bool duplicate = false;
      for (const auto& a : active) duplicate = duplicate || Params<AtomT>::same(a, cand);
      if (duplicate) {
        status = feasible ? "converged" : "stagnated";
        break;
      }
      active.push_back(cand);
      cols.conservativeResize(Eigen::NoChange, cols.cols() + 1);
      cols.col(cols.cols() - 1) = wa_.column(cand);
      if (c.size() + 1 != cols.cols()) c.conservativeResize(cols.cols() - 1);
      c.conservativeResize(cols.cols());
      c[c.size() - 1] = Scalar{0};

      // (iii) corrective re-fit, slide the active parameters, re-fit
      refit(cols, c, r, feasible, lambda0, eps, lambda_index, lambda);
      if (opt_.slide_iterations > 0 || opt_.slide_sweeps > 0) {
        slide(active, cols, c, r, !feasible);
        refit(cols, c, r, feasible, lambda0, eps, lambda_index, lambda);
      }
      if (feasible) {
        // (iv) drop atoms with zero weight
        std::vector<AtomT> kept;
        std::vector<Index> keep_idx;
        for (Index j = 0; j < c.size(); ++j) {
          if (c[j] != Scalar{0}) {
            kept.push_back(active[static_cast<std::size_t>(j)]);
            keep_idx.push_back(j);
          }
        }
        if (keep_idx.size() != active.size()) {
          Mat nc(cols.rows(), static_cast<Index>(keep_idx.size()));
          Vec ncoef(static_cast<Index>(keep_idx.size()));
          for (std::size_t j = 0; j < keep_idx.size(); ++j) {
            nc.col(static_cast<Index>(j)) = cols.col(keep_idx[j]);
            ncoef[static_cast<Index>(j)] = c[keep_idx[j]];
          }
          cols = std::move(nc);
          c = std::move(ncoef);
          active = std::move(kept);
        }
        status = "converged";
      }
      rep.history.push_back({it + 1, r.norm(), l1(c), static_cast<int>(active.size())});
      if (feasible) {
        const double m = l1(c);
        stalled = m < best_mass * (1.0 - 1e-4) ? 0 : stalled + 1;
        best_mass = std::min(best_mass, m);
        if (opt_.stall_iterations > 0 && stalled >= opt_.stall_iterations) break;
      }
    }

    rep.iterations = it;
    rep.residual = r.norm();
    rep.upper = c.size() ? l1(c) : 0.0;
    rep.atom_count = static_cast<int>(active.size());
    rep.lambda = lambda;
    rep.success = rep.residual <= eps * (1.0 + 1e-9);
    if (!rep.success) status = status == "converged" ? "budget_exhausted" : status;
    if (rep.success && status == "budget_exhausted") status = "converged_budget";
    rep.status = status;
    rep.lower = dual_lower(r);
    for (std::size_t i = 0; i < active.size(); ++i) {
      out.combination.push(active[i], c[static_cast<Index>(i)]);
    }
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

  /// <y, g>/sup_h |<h, g>| with g the residual direction.
  double dual_lower(const Vec& g) const {
    if (g.norm() == 0.0 || grid_.empty()) return 0.0;
    const Eigen::VectorXd scores = (grid_cols_.adjoint() * g).cwiseAbs();
    double sup = 0.0;
    AtomT best;
    best_refined(scores, g, Criterion::Raw, best, sup);
    if (sup <= 0.0) return 0.0;
    return std::max(0.0, std::abs(g.dot(y_)) - eps_ * g.norm()) / sup;
  }

  const std::vector<AtomT>& grid() const { return grid_; }
  const Mat& grid_columns() const { return grid_cols_; }
  const WeightedAtoms<AtomT>& weighted_atoms() const { return wa_; }

 private:
  // Refines the top-scoring grid atoms (ties to the lowest index) and keeps
  // the best refined one. False when no grid atom has a positive norm.
  bool best_refined(const Eigen::VectorXd& scores, const Vec& r, Criterion crit, AtomT& best,
                    double& best_val) const {
    std::vector<Index> order;
    for (Index j = 0; j < scores.size(); ++j) {
      if (scores[j] >= 0.0) order.push_back(j);
    }
    if (order.empty()) return false;
    const std::size_t top = std::min<std::size_t>(order.size(), std::max(1, opt_.refine_candidates));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](Index a, Index b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
    best_val = -1.0;
    for (std::size_t t = 0; t < top; ++t) {
      double v = 0.0;
      AtomT a = refine_atom(grid_[static_cast<std::size_t>(order[t])], wa_, r, crit, opt_.refine_steps, &v,
                            norm_floor_);
      if (v > best_val) {
        best_val = v;
        best = std::move(a);
      }
    }
    return true;
  }

  // Least squares while the residual constraint is out of reach, otherwise
  // the smallest-mass point on the lambda path.
  void refit(const Mat& cols, Vec& c, Vec& r, bool& feasible, double lambda0, double eps, int& lambda_index,
             double& lambda) const {
    LassoSystem<Scalar> sys(cols, y_);
    const Vec ls = sys.least_squares();
    if (sys.residual(ls) > eps) {
      c = ls;
      feasible = false;
    } else {
      Vec sol = c;
      if (!fit_path(sys, lambda0, eps, lambda_index, sol, lambda)) {
        sol = ls;
        lambda = 0.0;
      }
      c = sol;
      feasible = true;
    }
    r = y_ - cols * c;
  }

  // Block coordinate search over each active atom's parameters with the
  // weights held fixed; every accepted move lowers the residual.
  void slide(std::vector<AtomT>& active, Mat& cols, Vec& c, Vec& r, bool with_weights) const {
    if (opt_.slide_iterations > 0) levenberg_marquardt(active, cols, c, r, with_weights);
    for (int sweep = 0; sweep < opt_.slide_sweeps; ++sweep) {
      const double before = r.squaredNorm();
      for (std::size_t i = 0; i < active.size(); ++i) {
        const Index j = static_cast<Index>(i);
        const Scalar ci = c[j];
        if (ci == Scalar{0}) continue;
        const Vec partial = r + ci * cols.col(j);
        auto obj = [&](const Vec& col) { return -(partial - ci * col).squaredNorm(); };
        active[i] = detail::local_search(active[i], wa_, obj, opt_.refine_steps, 0.25, nullptr);
        cols.col(j) = wa_.column(active[i]);
        r = partial - ci * cols.col(j);
      }
      if (r.squaredNorm() >= (1.0 - 1e-12) * before) break;
    }
  }

  // Joint Levenberg-Marquardt on all active parameters (and real weights when
  // asked) with a forward-difference Jacobian. Parameter steps are clipped to
  // one grid spacing.
  void levenberg_marquardt(std::vector<AtomT>& active, Mat& cols, Vec& c, Vec& r, bool with_weights) const {
    const int np = Params<AtomT>::count(cfg_);
    const Index m = static_cast<Index>(active.size());
    if constexpr (!std::is_same_v<Scalar, double>) with_weights = false;
    const Index nparams = m * np;
    const Index unknowns = nparams + (with_weights ? m : 0);
    if (unknowns == 0 || unknowns > 400) return;
    Eigen::VectorXd spacing(np);
    for (int p = 0; p < np; ++p) spacing[p] = Params<AtomT>::spacing(cfg_, p);
    auto shifted = [&](const AtomT& a, const double* delta) {
      AtomT out = a;
      for (int p = 0; p < np; ++p) {
        if (delta[p] != 0.0) out = Params<AtomT>::perturb(out, p, delta[p], cfg_);
      }
      return out;
    };
    double mu = 1e-3;
    double rr = r.squaredNorm();
    Mat jac(r.size(), unknowns);
    for (int iter = 0; iter < opt_.slide_iterations && rr > 0.0; ++iter) {
      for (Index i = 0; i < m; ++i) {
        for (int p = 0; p < np; ++p) {
          const double h = 1e-6 * spacing[p];
          const AtomT a = Params<AtomT>::perturb(active[static_cast<std::size_t>(i)], p, h, cfg_);
          jac.col(i * np + p) = c[i] * (wa_.column(a) - cols.col(i)) / h;
        }
      }
      if (with_weights) jac.rightCols(m) = cols;
      const Eigen::MatrixXd jtj = (jac.adjoint() * jac).real();
      const Eigen::VectorXd jtr = (jac.adjoint() * r).real();
      bool accepted = false;
      for (int attempt = 0; attempt < 8 && !accepted; ++attempt) {
        Eigen::MatrixXd a = jtj;
        a.diagonal() += mu * (jtj.diagonal().array() + 1e-12 * jtj.diagonal().maxCoeff()).matrix();
        Eigen::VectorXd step = a.ldlt().solve(jtr);
        for (Index q = 0; q < nparams; ++q) {
          const double cap = spacing[q % np];
          step[q] = std::clamp(step[q], -cap, cap);
        }
        std::vector<AtomT> trial = active;
        Mat tcols = cols;
        for (Index i = 0; i < m; ++i) {
          trial[static_cast<std::size_t>(i)] = shifted(active[static_cast<std::size_t>(i)], step.data() + i * np);
          tcols.col(i) = wa_.column(trial[static_cast<std::size_t>(i)]);
        }
        Vec tc = c;
        if constexpr (std::is_same_v<Scalar, double>) {
          if (with_weights) tc += step.tail(m);
        }
        const Vec tr = y_ - tcols * tc;
        const double trr = tr.squaredNorm();
        if (trr < rr) {
          accepted = true;
          const double gain = rr - trr;
          active = std::move(trial);
          cols = std::move(tcols);
          c = tc;
          r = tr;
          rr = trr;
          mu = std::max(mu / 3.0, 1e-9);
          if (gain < 1e-10 * rr) return;
        } else {
          mu *= 4.0;
        }
      }
      if (!accepted) return;
    }
  }

  // Walks the fixed geometric lambda grid lambda0 * decay^j. Starts two
  // notches above the previous feasible index, moves up while still feasible,
  // down until feasible, then bisects (in log lambda) between the last
  // infeasible and the first feasible value.
  bool fit_path(const LassoSystem<Scalar>& sys, double lambda0, double eps, int& index, Vec& c,
                double& lambda_out) const {
    auto lam = [&](int j) { return lambda0 * std::pow(opt_.lambda_decay, j); };
    auto feasible_at = [&](double l, Vec& x) {
      sys.solve(l, x, opt_.max_sweeps, opt_.cd_tolerance);
      return sys.residual(x) <= eps;
    };
    int j = std::max(0, index - 2);
    Vec x = c;
    bool ok = feasible_at(lam(j), x);
    if (ok) {
      Vec up = x;
      while (j > 0) {
        Vec trial = up;
        if (!feasible_at(lam(j - 1), trial)) break;
        up = trial;
        --j;
      }
      x = up;
    } else {
      while (!ok) {
        ++j;
        if (lam(j) < opt_.lambda_floor) return false;
        ok = feasible_at(lam(j), x);
      }
    }
    double lo = lam(j);
    double hi = j > 0 ? lam(j - 1) : std::numeric_limits<double>::infinity();
    Vec best = x;
    if (std::isfinite(hi)) {
      for (int s = 0; s < opt_.polish_steps; ++s) {
        const double mid = std::sqrt(lo * hi);
        Vec trial = best;
        if (feasible_at(mid, trial)) {
          lo = mid;
          best = trial;
        } else {
          hi = mid;
        }
      }
    }
    index = j;
    c = best;
    lambda_out = lo;
    return true;
  }

  const GridFunction<Scalar>& f_;
  DictionaryConfig cfg_;
  SolverOptions opt_;
  WeightedAtoms<AtomT> wa_;
  std::vector<AtomT> grid_;
  Mat grid_cols_;
  Eigen::VectorXd grid_norms_;
  Vec y_;
  double eps_ = 0.0;
  double norm_floor_ = 0.0;
};

}  // namespace

template <typename AtomT>
UpperResult<AtomT> variation_upper(const GridFunction<atom_scalar_t<AtomT>>& f,
                                   const DictionaryConfig& config, const SolverOptions& options) {
  if (!f.quadrature) throw DomainError("variation_upper: function has no quadrature");
  if (!f.values.allFinite()) throw DomainError("variation_upper: non-finite target values");
  Solver<AtomT> solver(f, config, options, nullptr);
  return solver.run();
}

template UpperResult<RidgeAtom> variation_upper<RidgeAtom>(const RealFunction&, const DictionaryConfig&,
                                                           const SolverOptions&);
template UpperResult<SpectralAtom> variation_upper<SpectralAtom>(const ComplexFunction&,
                                                                 const DictionaryConfig&,
                                                                 const SolverOptions&);
template UpperResult<BarronAtom> variation_upper<BarronAtom>(const RealFunction&, const DictionaryConfig&,
                                                             const SolverOptions&);

std::vector<Eigen::VectorXi> monomial_exponents(int dim, int degree) {
  std::vector<Eigen::VectorXi> out;
  for (int total = 0; total <= degree; ++total) {
    // all alpha with |alpha| = total, lexicographically descending in alpha_0
    Eigen::VectorXi alpha = Eigen::VectorXi::Zero(dim);
    std::function<void(int, int)> rec = [&](int axis, int left) {
      if (axis == dim - 1) {
        alpha[axis] = left;
        out.push_back(alpha);
        return;
      }
      for (int a = left; a >= 0; --a) {
        alpha[axis] = a;
        rec(axis + 1, left - a);
      }
    };
    rec(0, total);
  }
  return out;
}

Eigen::MatrixXd monomial_matrix(const Points& x, const std::vector<Eigen::VectorXi>& exponents) {
  Eigen::MatrixXd m(x.cols(), static_cast<Index>(exponents.size()));
  for (std::size_t e = 0; e < exponents.size(); ++e) {
    for (Index j = 0; j < x.cols(); ++j) {
      double v = 1.0;
      for (Index i = 0; i < x.rows(); ++i) v *= std::pow(x(i, j), exponents[e][i]);
      m(j, static_cast<Index>(e)) = v;
    }
  }
  return m;
}

Eigen::VectorXd polynomial_fit(const RealFunction& f, int degree) {
  const auto& q = *f.quadrature;
  const auto exps = monomial_exponents(q.dim(), degree);
  const Eigen::VectorXd sw = q.weights().cwiseSqrt();
  const Eigen::MatrixXd a = sw.asDiagonal() * monomial_matrix(q.nodes(), exps);
  return a.colPivHouseholderQr().solve(sw.cwiseProduct(f.values));
}

QuotientResult quotient_variation_upper(const RealFunction& f, const DictionaryConfig& config,
                                        int degree, const SolverOptions& options) {
  if (config.family != Family::Ridge) {
    throw DomainError("quotient_variation_upper: ridge dictionary required");
  }
  if (degree < 0) throw DomainError("quotient_variation_upper: degree must be nonnegative");
  const auto& q = *f.quadrature;
  const auto exps = monomial_exponents(q.dim(), degree);
  const Eigen::VectorXd sw = q.weights().cwiseSqrt();
  const Eigen::MatrixXd a = sw.asDiagonal() * monomial_matrix(q.nodes(), exps);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Index rank = qr.rank();
  const Eigen::MatrixXd full_q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), rank);

  SolverOptions opt = options;
  if (opt.epsilon <= 0.0) opt.epsilon = opt.relative_epsilon * norm_l2(f);
  Solver<RidgeAtom> solver(f, config, opt, &full_q);
  QuotientResult out;
  auto res = solver.run();
  out.report = std::move(res.report);
  out.combination = std::move(res.combination);
  // polynomial part: least squares of f - synth onto the monomials
  const RealFunction rest = f - synth(out.combination, f.quadrature);
  const Eigen::VectorXd coef = polynomial_fit(rest, degree);
  out.polynomial = RealFunction(f.quadrature, monomial_matrix(q.nodes(), exps) * coef);
  return out;
}

template <typename AtomT>
LowerBound variation_lower(const GridFunction<atom_scalar_t<AtomT>>& f, const DictionaryConfig& config,
                           const GridFunction<atom_scalar_t<AtomT>>& certificate, int refine_steps,
                           double epsilon) {
  detail::require_same(f.quadrature, certificate.quadrature);
  if (norm_l2(certificate) == 0.0) throw DomainError("variation_lower: zero certificate");
  using Scalar = atom_scalar_t<AtomT>;
  config.validate();
  WeightedAtoms<AtomT> wa(*f.quadrature, config, nullptr);
  const Vector<Scalar> g = wa.weighted(certificate.values);
  const auto grid = family_grid<AtomT>(config);
  double raw = 0.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = std::abs(wa.column(grid[i]).dot(g));
    if (v > raw) {
      raw = v;
      best = i;
    }
  }
  double sup = raw;
  refine_atom(grid[best], wa, g, Criterion::Raw, refine_steps, &sup);
  if (sup <= 0.0) throw DomainError("variation_lower: certificate orthogonal to every atom");
  LowerBound lb;
  lb.sup = sup;
  lb.refinement_delta = sup - raw;
  lb.value = std::max(0.0, std::abs(inner(f, certificate)) - epsilon * norm_l2(certificate)) / sup;
  return lb;
}

template LowerBound variation_lower<RidgeAtom>(const RealFunction&, const DictionaryConfig&,
                                               const RealFunction&, int, double);
template LowerBound variation_lower<SpectralAtom>(const ComplexFunction&, const DictionaryConfig&,
                                                  const ComplexFunction&, int, double);
template LowerBound variation_lower<BarronAtom>(const RealFunction&, const DictionaryConfig&,
                                                const RealFunction&, int, double);

namespace {

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

RadonSynthesis radon_style_synthesis(const RidgeCombination& measure, int k, double c1, double c2,
                                     const QuadraturePtr& quadrature) {
  if (k < 0) throw DomainError("radon_style_synthesis: k must be nonnegative");
  const Points& x = quadrature->nodes();
  const int d = quadrature->dim();
  const double kf = factorial(k);
  RadonSynthesis out;
  out.exponents = monomial_exponents(d, k);
  out.polynomial_coefficients = Eigen::VectorXd::Zero(static_cast<Index>(out.exponents.size()));
  Eigen::VectorXd in_range = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd poly = Eigen::VectorXd::Zero(x.cols());
  for (std::size_t i = 0; i < measure.size(); ++i) {
    const RidgeAtom& a = measure.atoms[i];
    const double w = measure.coefficients[i] / kf;
    const Eigen::VectorXd t = (x.transpose() * a.omega).array() + a.b;
    Eigen::VectorXd term(t.size());
    for (Index j = 0; j < t.size(); ++j) term[j] = relu_power(t[j], k) - std::pow(t[j], k);
    if (a.b >= c1 && a.b <= c2) {
      in_range += w * term;
      out.in_range_measure.push({k, a.omega, a.b}, w);
    } else {
      poly += w * term;
      // b > c2: sigma_k(t) = t^k on the domain, term vanishes
      // b < c1: sigma_k(t) = 0, term is -(w.x+b)^k
      if (a.b < c1) {
        for (std::size_t e = 0; e < out.exponents.size(); ++e) {
          const Eigen::VectorXi& alpha = out.exponents[e];
          const int deg = alpha.sum();
          double coef = factorial(k) / factorial(k - deg) * std::pow(a.b, k - deg);
          for (int ax = 0; ax < d; ++ax) coef *= std::pow(a.omega[ax], alpha[ax]) / factorial(alpha[ax]);
          out.polynomial_coefficients[static_cast<Index>(e)] -= w * coef;
        }
      }
    }
  }
  out.in_range = RealFunction(quadrature, in_range);
  out.polynomial = RealFunction(quadrature, poly);
  out.total = RealFunction(quadrature, in_range + poly);
  return out;
}

template <typename AtomT>
ConverseCheck converse_maurey_check(const std::vector<SparseCombination<AtomT>>& sequence,
                                    const GridFunction<atom_scalar_t<AtomT>>& limit, double bound,
                                    const DictionaryConfig& config, const SolverOptions& options,
                                    double slack) {
  if (sequence.empty()) throw DomainError("converse_maurey_check: empty sequence");
  for (const auto& comb : sequence) {
    if (comb.mass() > bound * (1.0 + 1e-12) + 1e-15) {
      throw DomainError("converse_maurey_check: combination mass exceeds the bound");
    }
  }
  std::vector<double> dist;
  for (const auto& comb : sequence) dist.push_back(norm_l2(synth(comb, limit.quadrature) - limit));
  const double scale = std::max(norm_l2(limit), bound);
  const double tol = 0.05 * scale + 1e-12;
  if (dist.back() > tol || (dist.size() > 1 && dist.back() > dist.front() + 1e-12)) {
    throw DomainError("converse_maurey_check: sequence does not approach the limit");
  }
  ConverseCheck out;
  out.bound = bound;
  out.final_distance = dist.back();
  const auto res = variation_upper<AtomT>(limit, config, options);
  out.upper = res.report.upper;
  out.passed = res.report.success && out.upper <= bound * (1.0 + slack) + 1e-12;
  return out;
}

template ConverseCheck converse_maurey_check<RidgeAtom>(const std::vector<RidgeCombination>&,
                                                        const RealFunction&, double,
                                                        const DictionaryConfig&, const SolverOptions&,
                                                        double);
template ConverseCheck converse_maurey_check<SpectralAtom>(const std::vector<SpectralCombination>&,
                                                           const ComplexFunction&, double,
                                                           const DictionaryConfig&,
                                                           const SolverOptions&, double);

}  // namespace varspace
