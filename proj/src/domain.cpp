#include "varspace/domain.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace varspace {

BoxDomain::BoxDomain(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() == 0 || lo_.size() != hi_.size()) {
    throw DomainError("BoxDomain: lo and hi must be nonempty and of equal length");
  }
  for (Index i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] < hi_[i])) {
      throw DomainError("BoxDomain: lo[i] < hi[i] violated on axis " + std::to_string(i));
    }
  }
}

BoxDomain BoxDomain::cube(int dim, double lo, double hi) {
  return BoxDomain(Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi));
}

double BoxDomain::volume() const { return (hi_ - lo_).prod(); }

double BoxDomain::diameter() const { return (hi_ - lo_).norm(); }

double BoxDomain::max_radius() const {
  return lo_.cwiseAbs().cwiseMax(hi_.cwiseAbs()).norm();
}

double BoxDomain::min_dot(const Eigen::VectorXd& omega) const {
  double acc = 0.0;
  for (Index i = 0; i < lo_.size(); ++i) acc += std::min(lo_[i] * omega[i], hi_[i] * omega[i]);
  return acc;
}

double BoxDomain::max_dot(const Eigen::VectorXd& omega) const {
  double acc = 0.0;
  for (Index i = 0; i < lo_.size(); ++i) acc += std::max(lo_[i] * omega[i], hi_[i] * omega[i]);
  return acc;
}

bool BoxDomain::contains(const Eigen::VectorXd& x, double tol) const {
  for (Index i = 0; i < lo_.size(); ++i) {
    if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
  }
  return true;
}

Quadrature::Quadrature(BoxDomain domain, Points nodes, Eigen::VectorXd weights,
                       QuadratureKind kind, int level)
    : domain_(std::move(domain)),
      nodes_(std::move(nodes)),
      weights_(std::move(weights)),
      kind_(kind),
      level_(level) {
  if (nodes_.rows() != domain_.dim() || nodes_.cols() != weights_.size()) {
    throw DomainError("Quadrature: node/weight shape mismatch");
  }
}

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n <= 0) throw DomainError("gauss_legendre: n must be positive");
  nodes.resize(n);
  weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  if (n == 1) {
    nodes[0] = mid;
    weights[0] = 2.0 * half;
    return;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0;
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = mid - half * x;
    nodes[n - 1 - i] = mid + half * x;
    weights[i] = half * w;
    weights[n - 1 - i] = half * w;
  }
}

void composite_gauss(const Eigen::VectorXd& breakpoints, int order, Eigen::VectorXd& nodes,
                     Eigen::VectorXd& weights) {
  std::vector<double> xs;
  std::vector<double> ws;
  Eigen::VectorXd pn;
  Eigen::VectorXd pw;
  for (Index i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    gauss_legendre(order, a, b, pn, pw);
    xs.insert(xs.end(), pn.data(), pn.data() + pn.size());
    ws.insert(ws.end(), pw.data(), pw.data() + pw.size());
  }
  nodes = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Index>(xs.size()));
  weights = Eigen::Map<Eigen::VectorXd>(ws.data(), static_cast<Index>(ws.size()));
}

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                           53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

QuadraturePtr build_quadrature(const BoxDomain& domain, int level, QuadratureKind kind,
                               std::size_t memory_budget) {
  if (level <= 0) throw DomainError("build_quadrature: level must be positive");
  const int d = domain.dim();
  if (kind == QuadratureKind::TensorGauss) {
    if (d > 3) throw DomainError("build_quadrature: tensor Gauss rule supports d <= 3");
    if (level > 64) throw DomainError("build_quadrature: tensor level must be <= 64");
    std::size_t count = 1;
    for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(level);
    if (count * (d + 1) * sizeof(double) > memory_budget) {
      throw DomainError("build_quadrature: rule exceeds memory budget");
    }
    std::vector<Eigen::VectorXd> axis_nodes(d);
    std::vector<Eigen::VectorXd> axis_weights(d);
    for (int i = 0; i < d; ++i) {
      gauss_legendre(level, domain.lo()[i], domain.hi()[i], axis_nodes[i], axis_weights[i]);
    }
    const Index n = static_cast<Index>(count);
    Points nodes(d, n);
    Eigen::VectorXd weights(n);
    for (Index j = 0; j < n; ++j) {
      Index rem = j;
      double w = 1.0;
      // last axis varies fastest
      for (int i = d - 1; i >= 0; --i) {
        const Index idx = rem % level;
        rem /= level;
        nodes(i, j) = axis_nodes[i][idx];
        w *= axis_weights[i][idx];
      }
      weights[j] = w;
    }
    return std::make_shared<const Quadrature>(domain, std::move(nodes), std::move(weights), kind,
                                              level);
  }

  if (d > static_cast<int>(std::size(kPrimes))) {
    throw DomainError("build_quadrature: Halton sequence supports d <= 30");
  }
  if (level > 40) throw DomainError("build_quadrature: QMC level too large");
  const std::size_t count = std::size_t{1} << level;
  if (count * (d + 1) * sizeof(double) > memory_budget) {
    throw DomainError("build_quadrature: rule exceeds memory budget");
  }
  const Index n = static_cast<Index>(count);
  Points nodes(d, n);
  const Eigen::VectorXd span = domain.hi() - domain.lo();
  for (Index j = 0; j < n; ++j) {
    for (int i = 0; i < d; ++i) {
      // skip index 0, which maps to the corner
      nodes(i, j) = domain.lo()[i] + span[i] * radical_inverse(static_cast<std::uint64_t>(j + 1), kPrimes[i]);
    }
  }
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(n, domain.volume() / static_cast<double>(n));
  return std::make_shared<const Quadrature>(domain, std::move(nodes), std::move(weights), kind,
                                            level);
}

namespace {

template <typename Scalar, typename Fn>
GridFunction<Scalar> sample_impl(const Fn& fn, const QuadraturePtr& quadrature) {
  const Points& x = quadrature->nodes();
  Vector<Scalar> values(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd p = x.col(j);
    const Scalar v = fn(p);
    if (!std::isfinite(std::abs(v))) {
      std::ostringstream msg;
      msg << "sample: non-finite value at node " << j << " (";
      for (Index i = 0; i < p.size(); ++i) msg << (i ? ", " : "") << p[i];
      msg << ")";
      throw DomainError(msg.str());
    }
    values[j] = v;
  }
  return {quadrature, std::move(values)};
}

}  // namespace

RealFunction sample(const std::function<double(const Eigen::VectorXd&)>& fn,
                    const QuadraturePtr& quadrature) {
  return sample_impl<double>(fn, quadrature);
}

ComplexFunction sample_complex(const std::function<Complex(const Eigen::VectorXd&)>& fn,
                               const QuadraturePtr& quadrature) {
  return sample_impl<Complex>(fn, quadrature);
}

}  // namespace varspace
