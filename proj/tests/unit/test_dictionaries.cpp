#include <doctest.h>

#include <cmath>

#include "varspace/dictionaries.hpp"
#include "varspace/greedy.hpp"

using namespace varspace;

TEST_CASE("ridge, spectral and Barron atoms evaluate pointwise") {
  Points x(2, 3);
  x << 0.5, -1.0, 0.0, 0.25, 0.5, -0.75;
  RidgeAtom r;
  r.k = 2;
  r.omega = Eigen::Vector2d(0.6, 0.8);
  r.b = 0.1;
  const Eigen::VectorXd v = eval_ridge(r, x);
  for (Index j = 0; j < 3; ++j) {
    const double t = 0.6 * x(0, j) + 0.8 * x(1, j) + 0.1;
    CHECK(v[j] == doctest::Approx(t > 0 ? t * t : 0.0));
  }
  SpectralAtom s;
  s.s = 1.0;
  s.xi = Eigen::Vector2d(0.3, -0.4);
  const Eigen::VectorXcd e = eval_spectral(s, x);
  const Complex want = std::exp(Complex(0, 2 * M_PI * (0.3 * 0.5 - 0.4 * 0.25))) / 1.5;
  CHECK(std::abs(e[0] - want) < 1e-14);
  BarronAtom b;
  b.omega = Eigen::Vector2d(2.0, -1.0);
  b.b = 0.5;
  const Eigen::VectorXd bv = eval_barron(b, x);
  CHECK(bv[1] == doctest::Approx(0.0));
  CHECK(bv[0] == doctest::Approx((2.0 * 0.5 - 0.25 + 0.5) / 3.5));
}

TEST_CASE("offset validation") {
  const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
  CHECK(validate_offsets(box, -2.0, 2.0).ok);
  CHECK_FALSE(validate_offsets(box, -1.2, 2.0).ok);
  DictionaryConfig c;
  c.domain = box;
  c.c1 = -1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("sphere directions are unit and antipodally closed") {
  for (int d : {1, 2, 3, 5}) {
    const auto dirs = sphere_directions(d, 16);
    for (const auto& w : dirs) {
      CHECK(w.norm() == doctest::Approx(1.0));
      bool has_neg = false;
      for (const auto& u : dirs) has_neg = has_neg || (u + w).norm() < 1e-12;
      CHECK(has_neg);
    }
  }
}

TEST_CASE("atom norm bound matches the largest offset") {
  DictionaryConfig c;
  c.c1 = -2.0;
  c.c2 = 3.0;
  const auto q = build_quadrature(c.domain, 40, QuadratureKind::TensorGauss);
  // ||sigma_1(x + 3)||^2 on [-1, 1] by a midpoint sum
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double t = -1.0 + (i + 0.5) * 2.0 / n + 3.0;
    acc += t * t * 2.0 / n;
  }
  CHECK(atom_norm_sup(c, *q) == doctest::Approx(std::sqrt(acc)).epsilon(1e-8));
  CHECK(atom_norm_sup(c, *q) == doctest::Approx(std::sqrt(56.0 / 3.0)).epsilon(1e-12));
  CHECK(atom_norm_bound(c, *q) == doctest::Approx(kAtomNormSafety * std::sqrt(56.0 / 3.0)));
}

TEST_CASE("polynomial activations collapse the Gram rank") {
  const auto q = build_quadrature(BoxDomain::cube(2, -1.0, 1.0), 16, QuadratureKind::TensorGauss);
  CounterRng rng(3);
  Eigen::MatrixXd sq(q->size(), 60), lin(q->size(), 60);
  for (int i = 0; i < 60; ++i) {
    const Eigen::VectorXd w = random_direction(2, rng);
    const double b = rng.uniform();
    sq.col(i) = eval_activation([](double t) { return t * t; }, w, b, q->nodes());
    lin.col(i) = eval_activation([](double t) { return t; }, w, b, q->nodes());
  }
  CHECK(gram_rank(sq, *q, 1e-8) == 6);
  CHECK(gram_rank(lin, *q, 1e-8) == 3);
  const Eigen::MatrixXd g = gram_matrix(lin, *q);
  CHECK((g - g.transpose()).norm() < 1e-12);
}

TEST_CASE("logistic ramps approach the Heaviside atom") {
  const auto q = build_quadrature(BoxDomain::cube(1, -1.0, 1.0), 64, QuadratureKind::TensorGauss);
  const auto d = sigmoid_heaviside_limit({1.0, 10.0, 100.0}, q);
  CHECK(d[0] > d[1]);
  CHECK(d[1] > d[2]);
  // int_R (H(x) - logistic(r x))^2 dx = (2 ln 2 - 1) / r; Gauss nodes converge
  // slowly across the jump, about 0.6% at 64 points
  CHECK(d[1] == doctest::Approx(std::sqrt((2 * std::log(2.0) - 1) / 10.0)).epsilon(1e-2));
}

TEST_CASE("grids follow the configuration") {
  DictionaryConfig c;
  c.domain = BoxDomain::cube(2, -1.0, 1.0);
  c.grid.directions = 8;
  c.grid.offsets = 5;
  CHECK(ridge_grid(c).size() == 40);
  c.family = Family::Spectral;
  c.grid.lattice_step = 1.0;
  c.grid.lattice_radius = 1.0;
  CHECK(spectral_grid(c).size() == 5);
  CHECK(family_from_string("barron") == Family::Barron);
  CHECK_THROWS(family_from_string("wavelet"));
}
