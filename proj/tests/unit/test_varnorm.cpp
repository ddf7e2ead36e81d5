#include <doctest.h>

#include <cmath>

#include "varspace/greedy.hpp"
#include "varspace/varnorm.hpp"

using namespace varspace;

namespace {

RidgeAtom ridge(double w, double b, int k = 1) {
  RidgeAtom a;
  a.k = k;
  a.omega = Eigen::VectorXd::Constant(1, w);
  a.b = b;
  return a;
}

}  // namespace

TEST_CASE("a single atom is recovered with unit mass") {
  DictionaryConfig c;
  const auto q = build_quadrature(c.domain, 48, QuadratureKind::TensorGauss);
  for (double b : {-0.5, 0.0, 0.3125, 0.77}) {
    RidgeCombination t;
    t.push(ridge(1.0, b), 1.0);
    const auto res = variation_upper<RidgeAtom>(synth(t, q), c);
    CHECK(res.report.success);
    CHECK(res.report.upper <= 1.0 + 1e-9);
    CHECK(res.report.upper >= 0.99);
    CHECK(res.report.lower <= res.report.upper);
    CHECK(res.report.lower >= 0.9);
  }
}

TEST_CASE("the linear function needs two atoms of total mass one quarter for k = 2") {
  // x = (sigma_2(x + 2) - sigma_2(-x + 2)) / 8 on [-1, 1]; nothing cheaper exists
  DictionaryConfig c;
  c.k = 2;
  const auto q = build_quadrature(c.domain, 48, QuadratureKind::TensorGauss);
  const RealFunction f = sample([](const Eigen::VectorXd& x) { return x[0]; }, q);
  const auto res = variation_upper<RidgeAtom>(f, c);
  CHECK(res.report.success);
  CHECK(res.report.upper == doctest::Approx(0.25).epsilon(2e-3));
}

TEST_CASE("zero input and tolerances") {
  DictionaryConfig c;
  const auto q = build_quadrature(c.domain, 16, QuadratureKind::TensorGauss);
  const auto z = variation_upper<RidgeAtom>(RealFunction::zero(q), c);
  CHECK(z.report.success);
  CHECK(z.report.upper == 0.0);
  CHECK(z.combination.empty());
  RealFunction bad = RealFunction::zero(q);
  bad.values[0] = NAN;
  CHECK_THROWS_AS(variation_upper<RidgeAtom>(bad, c), DomainError);
}

TEST_CASE("residual and mass in the report match the returned combination") {
  DictionaryConfig c;
  const auto q = build_quadrature(c.domain, 48, QuadratureKind::TensorGauss);
  const RealFunction f = sample([](const Eigen::VectorXd& x) { return std::exp(x[0]); }, q);
  const auto res = variation_upper<RidgeAtom>(f, c);
  CHECK(res.report.success);
  CHECK(res.combination.mass() == doctest::Approx(res.report.upper));
  CHECK(norm_l2(f - synth(res.combination, q)) == doctest::Approx(res.report.residual).epsilon(1e-9));
  CHECK(res.report.residual <= res.report.epsilon * (1 + 1e-9));
  for (std::size_t i = 1; i < res.report.history.size(); ++i) {
    CHECK(res.report.history[i].iteration == res.report.history[i - 1].iteration + 1);
  }
}

TEST_CASE("the lower bound holds for any certificate") {
  DictionaryConfig c;
  const auto q = build_quadrature(c.domain, 48, QuadratureKind::TensorGauss);
  RidgeCombination t;
  t.push(ridge(1.0, 0.2), 1.5);
  t.push(ridge(-1.0, -0.4), -0.8);
  const RealFunction f = synth(t, q);
  for (auto cert : {f, sample([](const Eigen::VectorXd& x) { return std::cos(3 * x[0]); }, q)}) {
    const LowerBound lb = variation_lower<RidgeAtom>(f, c, cert);
    CHECK(lb.value <= t.mass() + 1e-12);
    CHECK(lb.sup > 0.0);
    CHECK(lb.refinement_delta >= 0.0);
  }
}

TEST_CASE("spectral atoms with complex weights") {
  DictionaryConfig c;
  c.family = Family::Spectral;
  c.s = 1.0;
  const auto q = build_quadrature(c.domain, 32, QuadratureKind::TensorGauss);
  const ComplexFunction f = sample_complex(
      [](const Eigen::VectorXd& x) {
        return Complex(0.0, 1.0) * std::exp(Complex(0, 2 * M_PI * 0.5 * x[0]));
      },
      q);
  const auto res = variation_upper<SpectralAtom>(f, c);
  CHECK(res.report.success);
  CHECK(res.report.upper == doctest::Approx(1.5).epsilon(5e-3));
}

TEST_CASE("polynomial helpers") {
  const auto ex = monomial_exponents(2, 2);
  CHECK(ex.size() == 6);
  CHECK(ex[0].sum() == 0);
  const auto q = build_quadrature(BoxDomain::cube(2, -1.0, 1.0), 8, QuadratureKind::TensorGauss);
  const RealFunction p = sample([](const Eigen::VectorXd& x) { return 1.0 - 2.0 * x[1] + 0.5 * x[0] * x[1]; }, q);
  const Eigen::VectorXd coef = polynomial_fit(p, 2);
  const Eigen::VectorXd back = monomial_matrix(q->nodes(), ex) * coef;
  CHECK((back - p.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("the quotient removes polynomials for free") {
  DictionaryConfig c;
  const auto q = build_quadrature(c.domain, 48, QuadratureKind::TensorGauss);
  const RealFunction lin = sample([](const Eigen::VectorXd& x) { return 3.0 - 2.0 * x[0]; }, q);
  const QuotientResult qr = quotient_variation_upper(lin, c, 1);
  CHECK(qr.report.upper <= qr.report.epsilon);
  RidgeCombination t;
  t.push(ridge(1.0, 0.1), 1.0);
  const RealFunction f = synth(t, q) + lin;
  const double quot = quotient_variation_upper(f, c, 1).report.upper;
  CHECK(quot <= variation_upper<RidgeAtom>(f, c).report.upper);
  // the residual tolerance lets the fit shave a little mass off the atom
  CHECK(quot <= 1.0 + 1e-6);
  CHECK(quot >= 0.95);
}

TEST_CASE("Radon-style synthesis splits by offset range") {
  const auto q = build_quadrature(BoxDomain::cube(1, -1.0, 1.0), 24, QuadratureKind::TensorGauss);
  RidgeCombination m;
  m.push(ridge(1.0, 0.5, 2), 2.0);
  m.push(ridge(-1.0, 3.0, 2), -1.0);
  m.push(ridge(1.0, -3.0, 2), 0.5);
  const RadonSynthesis rs = radon_style_synthesis(m, 2, -2.0, 2.0, q);
  CHECK(rs.in_range_measure.size() == 1);
  CHECK(rs.in_range_measure.coefficients[0] == doctest::Approx(1.0));
  // kernel (sigma_2(t) - t^2) / 2 vanishes for t > 0 and is -t^2 / 2 for t < 0;
  // at x = 0.2 the second atom has t = 2.8 and the third t = -2.8
  Points x(1, 1);
  x << 0.2;
  const double want_poly = 0.5 * -(2.8 * 2.8) / 2.0;
  const Eigen::MatrixXd mm = monomial_matrix(x, rs.exponents);
  CHECK((mm * rs.polynomial_coefficients)[0] == doctest::Approx(want_poly));
  CHECK((rs.total.values - rs.in_range.values - rs.polynomial.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("converse sampling check") {
  DictionaryConfig c;
  const auto q = build_quadrature(c.domain, 32, QuadratureKind::TensorGauss);
  RidgeCombination rep;
  rep.push(ridge(1.0, 0.25), 0.7);
  rep.push(ridge(-1.0, 0.5), -0.3);
  std::vector<RidgeCombination> seq;
  for (int n : {4, 16, 64, 256, 1024}) seq.push_back(maurey_sample(rep, n, 9));
  const ConverseCheck cc = converse_maurey_check(seq, synth(rep, q), 1.0, c);
  CHECK(cc.passed);
  CHECK(cc.upper <= 1.05);
  seq.back().coefficients[0] *= 3.0;
  CHECK_THROWS_AS(converse_maurey_check(seq, synth(rep, q), 1.0, c), DomainError);
}
