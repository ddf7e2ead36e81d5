#include "varspace/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "varspace/greedy.hpp"
#include "varspace/serialize.hpp"

namespace varspace {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelOrder = 16;

Eigen::VectorXd linspace_breaks(double a, double b, int panels) {
  return Eigen::VectorXd::LinSpaced(panels + 1, a, b);
}

void panel_rule(double a, double b, int panels, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  composite_gauss(linspace_breaks(a, b, panels), kPanelOrder, nodes, weights);
}

double weight_s(double r, double s) { return std::pow(1.0 + r, s); }

// Radial head rule on [0, r] with `level` panels per unit radius.
void radial_rule(double r, int level, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  const int panels = std::max(1, static_cast<int>(std::ceil(r * level)));
  panel_rule(0.0, r, panels, nodes, weights);
}

// Integral of fn over the ball |xi| <= r in d = 1 or 2.
template <typename Fn>
auto ball_integral(int dim, double r, int level, Fn&& fn) -> decltype(fn(Eigen::VectorXd())) {
  using T = decltype(fn(Eigen::VectorXd()));
  Eigen::VectorXd rn, rw;
  radial_rule(r, level, rn, rw);
  T acc{};
  if (dim == 1) {
    Eigen::VectorXd xi(1);
    for (Index i = 0; i < rn.size(); ++i) {
      xi[0] = rn[i];
      acc += rw[i] * fn(xi);
      xi[0] = -rn[i];
      acc += rw[i] * fn(xi);
    }
    return acc;
  }
  const int m = 32 * level;
  Eigen::VectorXd xi(2);
  for (Index i = 0; i < rn.size(); ++i) {
    T ring{};
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * kPi * j / m;
      xi << rn[i] * std::cos(th), rn[i] * std::sin(th);
      ring += fn(xi);
    }
    acc += rw[i] * rn[i] * (2.0 * kPi / m) * ring;
  }
  return acc;
}

void require_dim(const FourierPair& pair) {
  if (pair.dim < 1 || pair.dim > 2) throw DomainError("spectral: only d = 1 or 2 is supported");
}

}  // namespace

FourierPair gaussian_pair(int dim, double a) {
  if (dim < 1 || dim > 2) throw DomainError("gaussian pair: d must be 1 or 2");
  if (!(a > 0.0)) throw DomainError("gaussian pair: width must be positive");
  FourierPair p;
  p.name = "gaussian";
  p.dim = dim;
  const double scale = std::pow(2.0 * kPi * a, 0.5 * dim);
  p.spatial = [a](const Eigen::VectorXd& x) { return Complex(std::exp(-x.squaredNorm() / (2.0 * a)), 0.0); };
  p.transform = [a, scale](const Eigen::VectorXd& xi) {
    return Complex(scale * std::exp(-2.0 * kPi * kPi * a * xi.squaredNorm()), 0.0);
  };
  p.envelope = [a, scale](double r) { return scale * std::exp(-2.0 * kPi * kPi * a * r * r); };
  return p;
}

FourierPair cauchy_pair() {
  FourierPair p;
  p.name = "cauchy";
  p.dim = 1;
  p.spatial = [](const Eigen::VectorXd& x) { return Complex(1.0 / (1.0 + x[0] * x[0]), 0.0); };
  p.transform = [](const Eigen::VectorXd& xi) { return Complex(kPi * std::exp(-2.0 * kPi * std::abs(xi[0])), 0.0); };
  p.envelope = [](double r) { return kPi * std::exp(-2.0 * kPi * r); };
  return p;
}

FourierPair hat_pair() {
  FourierPair p;
  p.name = "hat";
  p.dim = 1;
  p.spatial = [](const Eigen::VectorXd& x) { return Complex(std::max(0.0, 1.0 - std::abs(x[0])), 0.0); };
  p.transform = [](const Eigen::VectorXd& xi) {
    const double t = kPi * xi[0];
    const double sinc = std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
    return Complex(sinc * sinc, 0.0);
  };
  p.envelope = [](double r) { return r <= 1.0 / kPi ? 1.0 : 1.0 / (kPi * kPi * r * r); };
  p.critical_s = 1.0;
  return p;
}

FourierPair builtin_pair(const std::string& name, int dim, double a) {
  if (name == "gaussian") return gaussian_pair(dim, a);
  if (dim != 1) throw DomainError("pair '" + name + "' is only available in d = 1");
  if (name == "cauchy") return cauchy_pair();
  if (name == "hat") return hat_pair();
  throw DomainError("unknown Fourier pair '" + name + "'");
}

double inversion_error(const FourierPair& pair, const BoxDomain& domain, double r_max, int level,
                       std::uint64_t seed, int points) {
  require_dim(pair);
  if (domain.dim() != pair.dim) throw DomainError("inversion check: dimension mismatch");
  CounterRng rng(seed);
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    Eigen::VectorXd x(pair.dim);
    for (int i = 0; i < pair.dim; ++i) {
      x[i] = domain.lo()[i] + rng.uniform() * (domain.hi()[i] - domain.lo()[i]);
    }
    const Complex inv = ball_integral(pair.dim, r_max, level, [&](const Eigen::VectorXd& xi) {
      return pair.transform(xi) * std::exp(Complex(0.0, 2.0 * kPi * xi.dot(x)));
    });
    worst = std::max(worst, std::abs(pair.spatial(x) - inv));
  }
  return worst;
}

double envelope_tail(const FourierPair& pair, double s, double r) {
  require_dim(pair);
  if (!pair.envelope) throw DomainError("spectral: pair '" + pair.name + "' has no decay envelope");
  if (s >= pair.critical_s) return std::numeric_limits<double>::infinity();
  if (r < pair.envelope_radius) throw DomainError("spectral: truncation radius inside the envelope radius");
  const double surface = pair.dim == 1 ? 2.0 : 2.0 * kPi;
  double acc = 0.0;
  double a = r;
  double w = 0.25;
  Eigen::VectorXd n, wt;
  for (int panel = 0; panel < 5000; ++panel) {
    gauss_legendre(kPanelOrder, a, a + w, n, wt);
    double part = 0.0;
    for (Index i = 0; i < n.size(); ++i) {
      part += wt[i] * weight_s(n[i], s) * pair.envelope(n[i]) * std::pow(n[i], pair.dim - 1);
    }
    acc += surface * part;
    if (surface * part <= 1e-17 * acc || (acc == 0.0 && panel > 8)) return acc;
    a += w;
    w *= 1.25;
  }
  return std::numeric_limits<double>::infinity();
}

SpectralValue spectral_barron_norm(const FourierPair& pair, double s, double r_max, int level) {
  require_dim(pair);
  if (s < 0.0) throw DomainError("spectral_barron_norm: s must be >= 0");
  if (!(r_max > 0.0) || level < 1) throw DomainError("spectral_barron_norm: bad truncation or level");
  SpectralValue v;
  v.tail = envelope_tail(pair, s, r_max);
  if (!std::isfinite(v.tail)) {
    throw DomainError("spectral_barron_norm: envelope tail of '" + pair.name + "' is not integrable at s = " +
                      format_double(s));
  }
  v.head = ball_integral(pair.dim, r_max, level, [&](const Eigen::VectorXd& xi) {
    return weight_s(xi.norm(), s) * std::abs(pair.transform(xi));
  });
  if (v.tail > 1e-6 * v.head) {
    std::ostringstream os;
    os << "spectral_barron_norm: tail bound " << v.tail << " exceeds 1e-6 of head " << v.head
       << "; increase the truncation radius";
    throw DomainError(os.str());
  }
  return v;
}

double gaussian_factor_integral(double R, double s) {
  if (!(R > 0.0) || s < 0.0) throw DomainError("gaussian_factor_integral: need R > 0, s >= 0");
  // xi = u / (pi sqrt(2R)) turns the integral into (2/sqrt(pi)) int_0^inf (1 + c u)^s e^{-u^2} du
  const double c = 1.0 / (kPi * std::sqrt(2.0 * R));
  Eigen::VectorXd n, w;
  panel_rule(0.0, 10.0, 40, n, w);
  double acc = 0.0;
  for (Index i = 0; i < n.size(); ++i) acc += w[i] * std::pow(1.0 + c * n[i], s) * std::exp(-n[i] * n[i]);
  return 2.0 / std::sqrt(kPi) * acc;
}

// ---------------------------------------------------------------------------

namespace {

double hermite(int n, double u) {
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * u;
  for (int m = 1; m < n; ++m) {
    const double h2 = 2.0 * u * h1 - 2.0 * m * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// n-th derivative of exp(-x^2 / (2R))
double gaussian_derivative(double R, int n, double x) {
  const double c = std::sqrt(2.0 * R);
  const double u = x / c;
  return std::pow(-1.0 / c, n) * hermite(n, u) * std::exp(-u * u);
}

double bump_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// 1 at t <= 0, 0 at t >= 1, all derivatives vanish at both ends
double smooth_step(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = bump_h(1.0 - t);
  return a / (a + bump_h(t));
}

struct Cutoff {
  double R, L;
  int k;
  Eigen::VectorXd taylor;  // coefficients in (x - L)

  Cutoff(double R_, double L_, int k_) : R(R_), L(L_), k(k_), taylor(k_ + 1) {
    double fact = 1.0;
    for (int n = 0; n <= k; ++n) {
      if (n > 0) fact *= n;
      taylor[n] = ((n == 0 ? 1.0 : 0.0) - gaussian_derivative(R, n, L)) / fact;
    }
  }

  double operator()(double x) const {
    const double ax = std::abs(x);
    if (ax <= L) return 1.0 - std::exp(-x * x / (2.0 * R));
    const double t = ax - L;
    if (t >= 1.0) return 0.0;
    double p = 0.0;
    for (Index n = taylor.size() - 1; n >= 0; --n) p = p * t + taylor[n];
    return p * smooth_step(t);
  }
};

// 2 int_0^{L+1} tau(x) cos(2 pi xi x) dx at each xi, x panels of width <= hx.
Eigen::VectorXd cosine_transform(const Cutoff& tau, const Eigen::VectorXd& xi, double hx) {
  const int p_in = std::max(1, static_cast<int>(std::ceil(tau.L / hx)));
  const int p_out = std::max(1, static_cast<int>(std::ceil(1.0 / hx)));
  Eigen::VectorXd n1, w1, n2, w2;
  panel_rule(0.0, tau.L, p_in, n1, w1);
  panel_rule(tau.L, tau.L + 1.0, p_out, n2, w2);
  Eigen::VectorXd xs(n1.size() + n2.size()), ws(n1.size() + n2.size());
  xs << n1, n2;
  ws << w1, w2;
  Eigen::VectorXd tw(xs.size());
  for (Index i = 0; i < xs.size(); ++i) tw[i] = 2.0 * ws[i] * tau(xs[i]);
  Eigen::VectorXd out(xi.size());
  for (Index j = 0; j < xi.size(); ++j) {
    out[j] = (tw.array() * (2.0 * kPi * xi[j] * xs.array()).cos()).sum();
  }
  return out;
}

// ||tau^{(k)}||_1 over R by analytic derivatives inside [-L, L] and a k-th
// central difference on the extension.
double derivative_l1(const Cutoff& tau) {
  const int k = tau.k;
  Eigen::VectorXd n, w;
  panel_rule(0.0, tau.L, 64, n, w);
  double inside = 0.0;
  for (Index i = 0; i < n.size(); ++i) inside += w[i] * std::abs(gaussian_derivative(tau.R, k, n[i]));
  const double h = 1e-2;
  const int steps = 2000;
  double outside = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double x = tau.L + (i + 0.5) / steps;
    double d = 0.0;
    double binom = 1.0;
    for (int m = 0; m <= k; ++m) {
      if (m > 0) binom = binom * (k - m + 1) / m;
      d += ((m % 2) ? -1.0 : 1.0) * binom * tau(x + (0.5 * k - m) * h);
    }
    outside += std::abs(d) / std::pow(h, k) / steps;
  }
  return 2.0 * (inside + outside);
}

}  // namespace

double cutoff_tau(double R, double L, int k, double x) { return Cutoff(R, L, k)(x); }

CutoffReport build_cutoff(double R, double s, double L, int k) {
  if (!(R > 0.0) || !(L > 0.0) || s < 0.0) throw DomainError("build_cutoff: need R > 0, L > 0, s >= 0");
  if (!(k > s + 2.0)) throw DomainError("build_cutoff: smoothness k must exceed s + 2");
  CutoffReport rep;
  rep.R = R;
  rep.s = s;
  rep.L = L;
  rep.k = k;
  const Cutoff tau(R, L, k);

  for (int i = 0; i <= 2000; ++i) {
    const double x = -L + 2.0 * L * i / 2000.0;
    const double phi = std::exp(-x * x / (2.0 * R)) + tau(x);
    rep.on_domain_max_error = std::max(rep.on_domain_max_error, std::abs(phi - 1.0));
  }

  // |tau^(xi)| <= ||tau^{(k)}||_1 / (2 pi xi)^k, so beyond Xi >= 1 the weighted
  // tail is at most 2^{s+1} N Xi^{s-k+1} / ((2 pi)^k (k - s - 1)).
  const double nk = 1.1 * derivative_l1(tau);
  const double ks = k - s - 1.0;
  const double c_tail = std::pow(2.0, s + 1.0) * nk / (std::pow(2.0 * kPi, k) * ks);
  const double target = 1e-5;
  const double xi_max = std::clamp(std::pow(c_tail / target, 1.0 / ks), 8.0, 200.0);
  rep.tail_bound = c_tail * std::pow(xi_max, -ks);

  // xi rule: fine near the Gaussian peak, width 1/4 beyond
  const double sigma = 1.0 / (2.0 * kPi * std::sqrt(R));
  const double knee = std::min(8.0 * sigma, xi_max / 2.0);
  Eigen::VectorXd n1, w1, n2, w2;
  panel_rule(0.0, knee, 32, n1, w1);
  panel_rule(knee, xi_max, std::max(1, static_cast<int>(std::ceil((xi_max - knee) * 4.0))), n2, w2);
  Eigen::VectorXd xi(n1.size() + n2.size()), wx(n1.size() + n2.size());
  xi << n1, n2;
  wx << w1, w2;

  const double hx = std::min(1.0 / 16.0, 1.0 / (2.0 * xi_max));
  const Eigen::VectorXd th = cosine_transform(tau, xi, hx);
  const Eigen::VectorXd th_fine = cosine_transform(tau, xi, hx / 2.0);
  const double diff = (th - th_fine).cwiseAbs().maxCoeff();
  if (!(diff <= 1e-9 * std::max(1.0, th_fine.cwiseAbs().maxCoeff()))) {
    throw DomainError("build_cutoff: transform quadrature did not settle (change " + format_double(diff) + ")");
  }

  double g_head = 0.0, t_head = 0.0, total_head = 0.0;
  for (Index j = 0; j < xi.size(); ++j) {
    const double ws = 2.0 * wx[j] * weight_s(xi[j], s);
    const double gh = std::sqrt(2.0 * kPi * R) * std::exp(-2.0 * kPi * kPi * R * xi[j] * xi[j]);
    g_head += ws * gh;
    t_head += ws * std::abs(th_fine[j]);
    total_head += ws * std::abs(gh + th_fine[j]);
  }
  rep.gaussian_integral = gaussian_factor_integral(R, s);
  const double g_tail = std::max(0.0, rep.gaussian_integral - g_head);
  rep.correction_integral = t_head + rep.tail_bound;
  rep.total = total_head + g_tail + rep.tail_bound;
  return rep;
}

std::string cutoff_csv(const std::vector<CutoffReport>& rows) {
  std::ostringstream os;
  os << "R,s,L,k,gaussian_integral,correction_integral,total,on_domain_max_error,tail_bound\n";
  for (const auto& r : rows) {
    os << format_double(r.R) << ',' << format_double(r.s) << ',' << format_double(r.L) << ',' << r.k << ','
       << format_double(r.gaussian_integral) << ',' << format_double(r.correction_integral) << ','
       << format_double(r.total) << ',' << format_double(r.on_domain_max_error) << ','
       << format_double(r.tail_bound) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

EqualityRow fs_equality_experiment(const FourierPair& pair, const DictionaryConfig& config, int level,
                                   double r_max, const SolverOptions& options, double slack) {
  require_dim(pair);
  if (config.family != Family::Spectral) throw DomainError("fs_equality: dictionary must be spectral");
  if (config.domain.dim() != pair.dim) throw DomainError("fs_equality: dimension mismatch");
  config.validate();
  EqualityRow row;
  row.name = pair.name;
  row.s = config.s;
  const SpectralValue sv = spectral_barron_norm(pair, config.s, r_max);
  row.spectral = sv.value();
  row.tail = sv.tail;
  const auto quad = build_quadrature(config.domain, level, QuadratureKind::TensorGauss);
  const ComplexFunction f = sample_complex(pair.spatial, quad);
  const auto res = variation_upper<SpectralAtom>(f, config, options);
  row.upper = res.report.upper;
  row.residual = res.report.residual;
  row.gap = row.upper - row.spectral;
  row.success = res.report.success;
  row.passed = row.success && row.upper <= row.spectral * (1.0 + slack);
  row.status = res.report.status;
  return row;
}

std::string equality_csv(const std::vector<EqualityRow>& rows) {
  std::ostringstream os;
  os << "name,s,variation_upper,residual,spectral_value,tail,gap,passed\n";
  for (const auto& r : rows) {
    os << r.name << ',' << format_double(r.s) << ',' << format_double(r.upper) << ','
       << format_double(r.residual) << ',' << format_double(r.spectral) << ',' << format_double(r.tail) << ','
       << format_double(r.gap) << ',' << (r.passed ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace varspace
