#include <doctest.h>

#include <cmath>

#include "varspace/spectral.hpp"

using namespace varspace;

TEST_CASE("Gaussian factor integral") {
  for (double R : {0.01, 1.0, 37.0, 1e4}) {
    CHECK(gaussian_factor_integral(R, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    // int (1 + |xi|) ghat = 1 + sqrt(2 pi) / (2 pi^2 sqrt(R))
    const double want = 1.0 + std::sqrt(2 * M_PI) / (2 * M_PI * M_PI * std::sqrt(R));
    CHECK(gaussian_factor_integral(R, 1.0) == doctest::Approx(want).epsilon(1e-10));
  }
  // s = 2: 1 + 2 E|xi| + E xi^2 with E xi^2 = 1 / (4 pi^2 R)
  const double R = 3.0;
  const double want = 1.0 + std::sqrt(2 * M_PI) / (M_PI * M_PI * std::sqrt(R)) + 1.0 / (4 * M_PI * M_PI * R);
  CHECK(gaussian_factor_integral(R, 2.0) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("spectral Barron norms of transform pairs") {
  const FourierPair g = gaussian_pair(1, 1.0);
  CHECK(spectral_barron_norm(g, 0.0, 3.0).value() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(spectral_barron_norm(g, 1.0, 3.0).value() == doctest::Approx(gaussian_factor_integral(1.0, 1.0)).epsilon(1e-10));
  const FourierPair g2 = gaussian_pair(2, 0.5);
  CHECK(spectral_barron_norm(g2, 0.0, 3.0).value() == doctest::Approx(1.0).epsilon(1e-8));
  const FourierPair c = cauchy_pair();
  CHECK(spectral_barron_norm(c, 0.0, 4.0).value() == doctest::Approx(1.0).epsilon(1e-8));
  // 2 pi int_0^inf xi e^{-2 pi xi} = 1 / (2 pi)
  CHECK(spectral_barron_norm(c, 1.0, 4.0).value() == doctest::Approx(1.0 + 1.0 / (2 * M_PI)).epsilon(1e-8));
  CHECK_THROWS_AS(spectral_barron_norm(g, 0.0, 0.5), DomainError);
}

TEST_CASE("envelope tails") {
  CHECK(std::isinf(envelope_tail(hat_pair(), 1.0, 5.0)));
  CHECK(std::isfinite(envelope_tail(hat_pair(), 0.5, 5.0)));
  // cauchy: 2 int_r^inf pi e^{-2 pi xi} = e^{-2 pi r}
  CHECK(envelope_tail(cauchy_pair(), 0.0, 2.0) == doctest::Approx(std::exp(-4 * M_PI)).epsilon(1e-6));
}

TEST_CASE("truncated inversion reproduces the function") {
  CHECK(inversion_error(gaussian_pair(1, 1.0), BoxDomain::cube(1, -1.0, 1.0), 3.0, 32) < 1e-9);
  CHECK(inversion_error(gaussian_pair(2, 1.0), BoxDomain::cube(2, -1.0, 1.0), 3.0, 16) < 1e-8);
}

TEST_CASE("cutoff profile") {
  const double R = 10.0, L = 1.0;
  for (double x : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    CHECK(cutoff_tau(R, L, 4, x) == doctest::Approx(1.0 - std::exp(-x * x / (2 * R))).epsilon(1e-14));
  }
  CHECK(cutoff_tau(R, L, 4, 2.0) == 0.0);
  CHECK(cutoff_tau(R, L, 4, -2.5) == 0.0);
  // continuity of the first derivatives across x = L
  const double h = 1e-6;
  for (double side : {1.0, -1.0}) {
    const double x = side * L;
    const double left = (cutoff_tau(R, L, 4, x) - cutoff_tau(R, L, 4, x - h)) / h;
    const double right = (cutoff_tau(R, L, 4, x + h) - cutoff_tau(R, L, 4, x)) / h;
    CHECK(left == doctest::Approx(right).epsilon(1e-4));
  }
  CHECK_THROWS_AS(build_cutoff(1.0, 2.0, 1.0, 4), DomainError);
}

TEST_CASE("cutoff report at one R") {
  const CutoffReport c = build_cutoff(100.0, 1.0, 1.0, 4);
  CHECK(c.gaussian_integral == doctest::Approx(gaussian_factor_integral(100.0, 1.0)));
  CHECK(c.total == doctest::Approx(c.gaussian_integral + c.correction_integral));
  CHECK(c.on_domain_max_error <= 1e-10);
  CHECK(c.tail_bound < 1e-3 * c.correction_integral);
  CHECK(cutoff_csv({c}).rfind("R,s,L,k,gaussian_integral,correction_integral,total,on_domain_max_error,tail_bound\n", 0) == 0);
}
