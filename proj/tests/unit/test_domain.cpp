#include <doctest.h>

#include <cmath>

#include "varspace/domain.hpp"

using namespace varspace;

TEST_CASE("gauss_legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 12, 40}) {
    Eigen::VectorXd x, w;
    gauss_legendre(n, -1.0, 2.0, x, w);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      const double exact = (std::pow(2.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1);
      double got = 0.0;
      for (Index i = 0; i < x.size(); ++i) got += w[i] * std::pow(x[i], p);
      CHECK(got == doctest::Approx(exact).epsilon(1e-12));
    }
    for (Index i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
  }
}

TEST_CASE("composite_gauss skips duplicate breakpoints") {
  Eigen::VectorXd bp(4), x, w;
  bp << -1.0, 0.0, 0.0, 1.0;
  composite_gauss(bp, 3, x, w);
  CHECK(x.size() == 6);
  CHECK(w.sum() == doctest::Approx(2.0));
  // |x| is smooth on each panel
  double got = 0.0;
  for (Index i = 0; i < x.size(); ++i) got += w[i] * std::abs(x[i]);
  CHECK(got == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("box geometry") {
  const BoxDomain b = BoxDomain::cube(3, -1.0, 1.0);
  CHECK(b.volume() == doctest::Approx(8.0));
  CHECK(b.max_radius() == doctest::Approx(std::sqrt(3.0)));
  Eigen::VectorXd w(3);
  w << 1.0, -2.0, 0.5;
  CHECK(b.max_dot(w) == doctest::Approx(3.5));
  CHECK(b.min_dot(w) == doctest::Approx(-3.5));
  CHECK_THROWS_AS(BoxDomain(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2)), DomainError);
}

TEST_CASE("tensor and quasi-Monte Carlo rules carry the box volume") {
  Eigen::VectorXd lo(2), hi(2);
  lo << -1.0, 0.0;
  hi << 2.0, 0.5;
  const BoxDomain box(lo, hi);
  for (auto kind : {QuadratureKind::TensorGauss, QuadratureKind::QuasiMonteCarlo}) {
    const auto q = build_quadrature(box, 8, kind);
    CHECK(q->weights().sum() == doctest::Approx(1.5));
    for (Index j = 0; j < q->size(); ++j) CHECK(box.contains(q->nodes().col(j), 1e-12));
  }
  const auto g = build_quadrature(box, 6, QuadratureKind::TensorGauss);
  // x^3 y^2 integrates exactly: (16 - 1)/4 * (0.125 / 3)
  const RealFunction f = sample([](const Eigen::VectorXd& x) { return x[0] * x[0] * x[0] * x[1] * x[1]; }, g);
  CHECK(f.values.dot(g->weights()) == doctest::Approx(15.0 / 4.0 * 0.125 / 3.0).epsilon(1e-13));
}

TEST_CASE("quadrature budget and non-finite samples are rejected") {
  CHECK_THROWS_AS(build_quadrature(BoxDomain::cube(3, -1.0, 1.0), 64, QuadratureKind::TensorGauss, 1024),
                  DomainError);
  const auto q = build_quadrature(BoxDomain::cube(1, -1.0, 1.0), 4, QuadratureKind::TensorGauss);
  CHECK_THROWS_AS(sample([](const Eigen::VectorXd& x) { return 1.0 / (x[0] - x[0]); }, q), DomainError);
}

TEST_CASE("inner products and norms") {
  const auto q = build_quadrature(BoxDomain::cube(1, -1.0, 1.0), 10, QuadratureKind::TensorGauss);
  const RealFunction a = sample([](const Eigen::VectorXd& x) { return x[0]; }, q);
  const RealFunction b = sample([](const Eigen::VectorXd& x) { return x[0] * x[0]; }, q);
  CHECK(std::abs(inner(a, b)) < 1e-15);
  CHECK(norm_l2(a) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(norm_l2(a + b) == doctest::Approx(std::sqrt(2.0 / 3.0 + 2.0 / 5.0)));
  const auto other = build_quadrature(BoxDomain::cube(1, -1.0, 1.0), 10, QuadratureKind::TensorGauss);
  const RealFunction c = sample([](const Eigen::VectorXd& x) { return x[0]; }, other);
  CHECK_THROWS(inner(a, c));
}
