#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace varspace {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Point sets are stored column-wise: one column per point, one row per axis.
using Points = Eigen::MatrixXd;

/// Raised when a precondition on user-supplied data fails.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d].
class BoxDomain {
 public:
  BoxDomain(Eigen::VectorXd lo, Eigen::VectorXd hi);

  static BoxDomain cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }

  double volume() const;
  double diameter() const;
  /// max |x|_2 over the box, attained at a corner.
  double max_radius() const;
  /// inf / sup of x.omega over the box for a fixed direction.
  double min_dot(const Eigen::VectorXd& omega) const;
  double max_dot(const Eigen::VectorXd& omega) const;
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;

 private:
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
};

enum class QuadratureKind { TensorGauss, QuasiMonteCarlo };

/// Byte budget for quadrature node storage; build_quadrature refuses rules
/// that would exceed it.
inline constexpr std::size_t kDefaultQuadratureBudget = std::size_t{1} << 28;

/// A positive-weight cubature rule on a box. Immutable once built.
class Quadrature {
 public:
  Quadrature(BoxDomain domain, Points nodes, Eigen::VectorXd weights,
             QuadratureKind kind, int level);

  const BoxDomain& domain() const { return domain_; }
  const Points& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  QuadratureKind kind() const { return kind_; }
  int level() const { return level_; }
  Index size() const { return weights_.size(); }
  int dim() const { return domain_.dim(); }

 private:
  BoxDomain domain_;
  Points nodes_;
  Eigen::VectorXd weights_;
  QuadratureKind kind_;
  int level_;
};

using QuadraturePtr = std::shared_ptr<const Quadrature>;

/// n-point Gauss-Legendre rule on [a, b]; nodes ascending.
void gauss_legendre(int n, double a, double b, Eigen::VectorXd& nodes,
                    Eigen::VectorXd& weights);

/// Composite Gauss-Legendre rule with `order` points on each panel between
/// consecutive breakpoints. Breakpoints must be sorted; duplicates are skipped.
void composite_gauss(const Eigen::VectorXd& breakpoints, int order,
                     Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Tensor Gauss-Legendre (level points per axis, d <= 3) or a Halton
/// sequence with at least 2^level points.
QuadraturePtr build_quadrature(const BoxDomain& domain, int level,
                               QuadratureKind kind,
                               std::size_t memory_budget = kDefaultQuadratureBudget);

/// Values of a function on the nodes of a shared quadrature.
template <typename Scalar>
struct GridFunction {
  QuadraturePtr quadrature;
  Vector<Scalar> values;

  GridFunction() = default;
  GridFunction(QuadraturePtr q, Vector<Scalar> v)
      : quadrature(std::move(q)), values(std::move(v)) {
    if (quadrature && values.size() != quadrature->size()) {
      throw DomainError("GridFunction: value count does not match node count");
    }
  }

  static GridFunction zero(QuadraturePtr q) {
    const Index n = q->size();
    return GridFunction(std::move(q), Vector<Scalar>::Zero(n));
  }
};

using RealFunction = GridFunction<double>;
using ComplexFunction = GridFunction<Complex>;

namespace detail {
inline void require_same(const QuadraturePtr& a, const QuadraturePtr& b) {
  if (!a || a != b) {
    throw std::logic_error("grid functions live on different quadratures");
  }
}
inline double conj_if(double x) { return x; }
inline Complex conj_if(const Complex& z) { return std::conj(z); }
}  // namespace detail

/// sum_j w_j f(x_j) conj(g(x_j)).
template <typename Scalar>
Scalar inner(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
  detail::require_same(f.quadrature, g.quadrature);
  const auto& w = f.quadrature->weights();
  Scalar acc{0};
  for (Index j = 0; j < w.size(); ++j) {
    acc += w[j] * f.values[j] * detail::conj_if(g.values[j]);
  }
  return acc;
}

template <typename Scalar>
double norm_l2(const GridFunction<Scalar>& f) {
  const auto& w = f.quadrature->weights();
  double acc = 0.0;
  for (Index j = 0; j < w.size(); ++j) acc += w[j] * std::norm(f.values[j]);
  return std::sqrt(acc);
}

template <typename Scalar>
GridFunction<Scalar> operator+(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
  detail::require_same(f.quadrature, g.quadrature);
  return {f.quadrature, f.values + g.values};
}

template <typename Scalar>
GridFunction<Scalar> operator-(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
  detail::require_same(f.quadrature, g.quadrature);
  return {f.quadrature, f.values - g.values};
}

template <typename Scalar>
GridFunction<Scalar> operator*(Scalar c, const GridFunction<Scalar>& f) {
  return {f.quadrature, c * f.values};
}

inline ComplexFunction to_complex(const RealFunction& f) {
  return {f.quadrature, f.values.cast<Complex>()};
}

/// Pointwise evaluation of `fn` on every node. Throws DomainError naming the
/// first node where the value is not finite.
RealFunction sample(const std::function<double(const Eigen::VectorXd&)>& fn,
                    const QuadraturePtr& quadrature);

ComplexFunction sample_complex(const std::function<Complex(const Eigen::VectorXd&)>& fn,
                               const QuadraturePtr& quadrature);

}  // namespace varspace
