#include <doctest.h>

#include <cmath>

#include "varspace/onedim.hpp"

using namespace varspace;

namespace {

double dense_tv(const std::function<double(double)>& g, int n = 2000000) {
  double tv = 0.0, prev = g(-1.0);
  for (int i = 1; i <= n; ++i) {
    const double v = g(-1.0 + 2.0 * i / n);
    tv += std::abs(v - prev);
    prev = v;
  }
  return tv;
}

}  // namespace

TEST_CASE("BV norm of simple profiles") {
  CHECK(bv_norm(builtin_profile("relu1")) == doctest::Approx(1.0));
  CHECK(bv_norm(builtin_profile("heaviside")) == doctest::Approx(1.0));
  CHECK(bv_norm(builtin_profile("x")) == doctest::Approx(3.0));
  CHECK(bv_norm(builtin_profile("x2")) == doctest::Approx(3.0));
  // exp is monotone: e^-1 + (e - e^-1)
  CHECK(bv_norm(builtin_profile("exp")) == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("exact total variation of piecewise polynomials with interior extrema") {
  PiecewisePolynomial p;
  p.breakpoints = {0.0};
  p.pieces = {(Eigen::VectorXd(4) << 0.0, -1.0, 0.0, 1.0).finished(),  // x^3 - x
              (Eigen::VectorXd(2) << 2.0, -1.0).finished()};           // jump to 2 - x
  const ProfileFunction f = ProfileFunction::piecewise("t", p);
  const double want = std::abs(f(-1.0)) + dense_tv([&](double x) { return f(x); });
  CHECK(bv_norm(f) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("adaptive total variation of smooth functions") {
  auto g = [](double x) { return std::sin(3.0 * x) + 0.3 * x; };
  CHECK(total_variation_adaptive(g) == doctest::Approx(dense_tv(g)).epsilon(1e-5));
}

TEST_CASE("characterization norm") {
  CHECK(characterization_norm(builtin_profile("relu1"), 1) == doctest::Approx(1.0));
  CHECK(characterization_norm(builtin_profile("x"), 1) == doctest::Approx(2.0));
  CHECK(characterization_norm(builtin_profile("relu2"), 2) == doctest::Approx(2.0));
  CHECK(characterization_norm(builtin_profile("x"), 0) == doctest::Approx(3.0));
  const double e = std::exp(1.0);
  CHECK(characterization_norm(builtin_profile("exp"), 1) == doctest::Approx(1.0 / e + e));
  CHECK(characterization_norm(builtin_profile("exp"), 2) == doctest::Approx(2.0 / e + e));
}

TEST_CASE("Peano constant from the boundary system") {
  for (int k : {1, 2, 3}) {
    const double c2 = 2.0;
    const auto b = peano_offsets(k, c2);
    REQUIRE(b.size() == static_cast<std::size_t>(k + 1));
    Eigen::MatrixXd m(k + 1, k + 1);
    for (int j = 0; j <= k; ++j) {
      for (int i = 0; i <= k; ++i) {
        double binom = 1.0;
        for (int t = 0; t < j; ++t) binom = binom * (k - t) / (t + 1);
        m(j, i) = binom * std::pow(b[i] - 1.0, k - j);
      }
    }
    const double norm1 = m.inverse().cwiseAbs().colwise().sum().maxCoeff();
    CHECK(peano_constant(k, c2) == doctest::Approx(std::max(1.0, norm1)));
  }
  CHECK(peano_constant(1, 2.0) == doctest::Approx(20.0 / 9.0));
}

TEST_CASE("Peano synthesis reproduces smooth functions") {
  const auto q = build_quadrature(BoxDomain::cube(1, -1.0, 1.0), 32, QuadratureKind::TensorGauss);
  for (const std::string id : {"exp", "log2px", "cubic"}) {
    for (int k : {1, 2}) {
      const ProfileFunction f = builtin_profile(id);
      if (id == "cubic" && k < 3) {
        CHECK_THROWS_AS(peano_synthesis(f, k, q, -2.0, 2.0), DomainError);
        continue;
      }
      const PeanoResult r = peano_synthesis(f, k, q, -2.0, 2.0);
      CHECK(r.residual < 1e-9);
      CHECK(r.mass() <= r.constant * r.characterization * (1 + 1e-12));
      CHECK(r.combination.mass() == doctest::Approx(r.mass()));
    }
  }
  CHECK_THROWS_AS(peano_synthesis(builtin_profile("exp"), 1, q, -0.5, 2.0), DomainError);
  CHECK_THROWS_AS(peano_synthesis(builtin_profile("exp"), 1, q, -2.0, 1.0), DomainError);
}

TEST_CASE("Peano synthesis of kinked profiles adds jump atoms") {
  const auto q = build_quadrature(BoxDomain::cube(1, -1.0, 1.0), 32, QuadratureKind::TensorGauss);
  const PeanoResult r = peano_synthesis(builtin_profile("pwl3"), 1, q, -2.0, 2.0);
  CHECK(r.residual < 1e-9);
  CHECK_THROWS_AS(peano_synthesis(builtin_profile("heaviside"), 1, q, -2.0, 2.0), DomainError);
}

TEST_CASE("profile validation") {
  PiecewisePolynomial p;
  p.breakpoints = {0.5, 0.2};
  p.pieces = {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)};
  CHECK_THROWS_AS(ProfileFunction::piecewise("bad", p), DomainError);
  CHECK_THROWS_AS(ProfileFunction::smooth("bad", {[](double x) { return std::sin(x); },
                                                  [](double x) { return -std::cos(x); }}),
                  DomainError);
  CHECK_THROWS(builtin_profile("nope"));
  const ProfileFunction f = builtin_profile("cubic");
  CHECK(f.derivative_value(1, 0.5) == doctest::Approx(-0.5 + 3 * 0.25));
  CHECK(f.derivative(3)(0.1) == doctest::Approx(6.0));
}

TEST_CASE("equivalence rows") {
  EquivalenceOptions o;
  const auto rows = equivalence_experiment({{builtin_profile("relu1"), 1}, {builtin_profile("x"), 2}}, o);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].ratio == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(rows[1].upper == doctest::Approx(0.25).epsilon(5e-3));
  CHECK(rows[1].in_window);
  CHECK(equivalence_csv(rows).rfind("function_id,k,characterization_norm,variation_upper,ratio,refinement_ratio\n", 0) == 0);
  CHECK(default_equivalence_suite().size() >= 8);
}
