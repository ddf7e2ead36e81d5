#include "varspace/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "varspace/serialize.hpp"

namespace varspace {

namespace {

double horner(const Eigen::VectorXd& c, double x) {
  double v = 0.0;
  for (Index i = c.size() - 1; i >= 0; --i) v = v * x + c[i];
  return v;
}

Eigen::VectorXd poly_derivative(const Eigen::VectorXd& c) {
  if (c.size() <= 1) return Eigen::VectorXd::Zero(1);
  Eigen::VectorXd d(c.size() - 1);
  for (Index i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i];
  return d;
}

// Real roots of the polynomial inside (a, b), sorted.
std::vector<double> real_roots_in(const Eigen::VectorXd& c, double a, double b) {
  Index n = c.size() - 1;
  const double scale = c.cwiseAbs().maxCoeff();
  while (n > 0 && std::abs(c[n]) <= 1e-14 * scale) --n;
  std::vector<double> out;
  if (n <= 0) return out;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (Index i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  for (Index i = 0; i < n; ++i) {
    const Complex z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-9 * (1.0 + std::abs(z.real()))) continue;
    // one Newton step against the companion rounding
    double x = z.real();
    const Eigen::VectorXd dc = poly_derivative(c.head(n + 1));
    const double dp = horner(dc, x);
    if (dp != 0.0) x -= horner(c.head(n + 1), x) / dp;
    if (x > a && x < b) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Pieces of base + sum_j c_j (x - t_j)_+^m in global monomial coefficients.
PiecewisePolynomial truncated_power_sum(const Eigen::VectorXd& base,
                                        const std::vector<std::pair<double, double>>& terms, int m) {
  PiecewisePolynomial p;
  const Index len = std::max<Index>(base.size(), m + 1);
  Eigen::VectorXd cur = Eigen::VectorXd::Zero(len);
  cur.head(base.size()) = base;
  p.pieces.push_back(cur);
  for (const auto& [t, c] : terms) {
    for (int i = 0; i <= m; ++i) cur[i] += c * binom(m, i) * std::pow(-t, m - i);
    p.breakpoints.push_back(t);
    p.pieces.push_back(cur);
  }
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------

int PiecewisePolynomial::degree() const {
  int d = 0;
  for (const auto& c : pieces) {
    for (Index i = c.size() - 1; i > d; --i) {
      if (c[i] != 0.0) {
        d = static_cast<int>(i);
        break;
      }
    }
  }
  return d;
}

std::size_t PiecewisePolynomial::piece_index(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), x) -
                                  breakpoints.begin());
}

double PiecewisePolynomial::operator()(double x) const { return horner(pieces[piece_index(x)], x); }

PiecewisePolynomial PiecewisePolynomial::derivative() const {
  PiecewisePolynomial d;
  d.breakpoints = breakpoints;
  for (const auto& c : pieces) d.pieces.push_back(poly_derivative(c));
  return d;
}

void PiecewisePolynomial::check(int max_degree) const {
  if (pieces.size() != breakpoints.size() + 1) {
    throw DomainError("piecewise polynomial: need one more piece than breakpoints");
  }
  double prev = -1.0;
  for (double t : breakpoints) {
    if (!(t > prev) || !(t < 1.0)) {
      throw DomainError("piecewise polynomial: breakpoints must increase strictly inside (-1, 1)");
    }
    prev = t;
  }
  for (const auto& c : pieces) {
    if (c.size() == 0) throw DomainError("piecewise polynomial: empty piece");
    if (!c.allFinite()) throw DomainError("piecewise polynomial: non-finite coefficient");
  }
  if (degree() > max_degree) throw DomainError("piecewise polynomial: degree exceeds the configured maximum");
}

ProfileFunction ProfileFunction::piecewise(std::string id, PiecewisePolynomial p, int max_degree) {
  p.check(max_degree);
  ProfileFunction f;
  f.id_ = std::move(id);
  f.rep_ = std::move(p);
  return f;
}

ProfileFunction ProfileFunction::smooth(std::string id,
                                        std::vector<std::function<double(double)>> derivatives) {
  if (derivatives.empty()) throw DomainError("smooth profile '" + id + "': no callables");
  const double h = 1e-5;
  for (std::size_t j = 1; j < derivatives.size(); ++j) {
    for (double x : {-0.83, -0.31, 0.12, 0.57, 0.94}) {
      const double fd = (derivatives[j - 1](x + h) - derivatives[j - 1](x - h)) / (2.0 * h);
      const double v = derivatives[j](x);
      if (std::abs(fd - v) > 1e-4 * std::max(1.0, std::abs(v))) {
        std::ostringstream os;
        os << "smooth profile '" << id << "': derivative " << j << " disagrees with finite difference at x="
           << x << " (" << v << " vs " << fd << ")";
        throw DomainError(os.str());
      }
    }
  }
  ProfileFunction f;
  f.id_ = std::move(id);
  f.rep_ = SmoothProfile{std::move(derivatives)};
  return f;
}

const PiecewisePolynomial& ProfileFunction::as_piecewise() const {
  if (!is_piecewise()) throw DomainError("profile '" + id_ + "' is not piecewise polynomial");
  return std::get<PiecewisePolynomial>(rep_);
}

const SmoothProfile& ProfileFunction::as_smooth() const {
  if (is_piecewise()) throw DomainError("profile '" + id_ + "' is not smooth");
  return std::get<SmoothProfile>(rep_);
}

int ProfileFunction::order() const {
  return is_piecewise() ? std::numeric_limits<int>::max() : as_smooth().order();
}

double ProfileFunction::derivative_value(int j, double x) const {
  if (j < 0) throw DomainError("negative derivative order");
  if (is_piecewise()) {
    PiecewisePolynomial p = as_piecewise();
    for (int i = 0; i < j; ++i) p = p.derivative();
    return p(x);
  }
  const auto& s = as_smooth();
  if (j > s.order()) {
    throw DomainError("profile '" + id_ + "': derivative " + std::to_string(j) + " not supplied");
  }
  return s.derivatives[static_cast<std::size_t>(j)](x);
}

ProfileFunction ProfileFunction::derivative(int j) const {
  if (j < 0) throw DomainError("negative derivative order");
  ProfileFunction out;
  out.id_ = id_ + "^(" + std::to_string(j) + ")";
  if (is_piecewise()) {
    PiecewisePolynomial p = as_piecewise();
    for (int i = 0; i < j; ++i) p = p.derivative();
    out.rep_ = std::move(p);
    return out;
  }
  const auto& s = as_smooth();
  if (j > s.order()) {
    throw DomainError("profile '" + id_ + "': derivative " + std::to_string(j) + " not supplied");
  }
  out.rep_ = SmoothProfile{{s.derivatives.begin() + j, s.derivatives.end()}};
  return out;
}

// ---------------------------------------------------------------------------

double total_variation_adaptive(const std::function<double(double)>& g, double relative_tolerance,
                                int max_doublings) {
  // Sampled variation with each interior turning point replaced by a
  // golden-section estimate of the true extremum in its bracket.
  auto extremum = [&](double a, double b, double sign) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = sign * g(x1), f2 = sign * g(x2);
    for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
      if (f1 > f2) {
        b = x2; x2 = x1; f2 = f1;
        x1 = b - phi * (b - a); f1 = sign * g(x1);
      } else {
        a = x1; x1 = x2; f1 = f2;
        x2 = a + phi * (b - a); f2 = sign * g(x2);
      }
    }
    return sign * std::max(f1, f2);
  };
  auto sweep = [&](int n) {
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = g(-1.0 + 2.0 * i / n);
    double tv = 0.0;
    double prev = v[0];
    for (int i = 1; i <= n; ++i) {
      double cur = v[i];
      if (i < n && (v[i] - v[i - 1]) * (v[i + 1] - v[i]) < 0.0) {
        const double sign = v[i] > v[i - 1] ? 1.0 : -1.0;
        const double e = extremum(-1.0 + 2.0 * (i - 1) / n, -1.0 + 2.0 * (i + 1) / n, sign);
        if (sign * e > sign * cur) cur = e;
      }
      tv += std::abs(cur - prev);
      prev = cur;
    }
    return tv;
  };
  int n = 64;
  double last = sweep(n);
  for (int it = 0; it < max_doublings; ++it) {
    n *= 2;
    const double cur = sweep(n);
    if (std::abs(cur - last) <= relative_tolerance * std::max(cur, 1e-300) || cur == last) return cur;
    last = cur;
  }
  throw DomainError("total variation: no convergence after " + std::to_string(max_doublings) +
                    " doublings");
}

double bv_norm(const ProfileFunction& g) {
  if (!g.is_piecewise()) {
    const auto& s = g.as_smooth();
    return std::abs(s.derivatives[0](-1.0)) + total_variation_adaptive(s.derivatives[0]);
  }
  const auto& p = g.as_piecewise();
  double tv = 0.0;
  for (std::size_t i = 0; i < p.pieces.size(); ++i) {
    const double a = i == 0 ? -1.0 : p.breakpoints[i - 1];
    const double b = i == p.breakpoints.size() ? 1.0 : p.breakpoints[i];
    const auto& c = p.pieces[i];
    std::vector<double> ts{a};
    for (double r : real_roots_in(poly_derivative(c), a, b)) ts.push_back(r);
    ts.push_back(b);
    for (std::size_t j = 1; j < ts.size(); ++j) tv += std::abs(horner(c, ts[j]) - horner(c, ts[j - 1]));
    if (i > 0) tv += std::abs(horner(c, a) - horner(p.pieces[i - 1], a));
  }
  return std::abs(p(-1.0)) + tv;
}

double characterization_norm(const ProfileFunction& f, int k) {
  if (k < 0) throw DomainError("characterization_norm: k must be >= 0");
  if (f.order() < k) {
    throw DomainError("characterization_norm: profile '" + f.id() + "' lacks derivative " + std::to_string(k));
  }
  double total = 0.0;
  for (int j = 0; j < k; ++j) total += std::abs(f.derivative_value(j, -1.0));
  return total + bv_norm(f.derivative(k));
}

// ---------------------------------------------------------------------------

std::vector<double> peano_offsets(int k, double c2) {
  if (!(c2 > 1.0)) throw DomainError("peano: c2 must exceed 1");
  const double delta = (c2 - 1.0) / 10.0;
  const double lo = 1.0 + delta;
  std::vector<double> b(static_cast<std::size_t>(k + 1));
  for (int i = 0; i <= k; ++i) b[static_cast<std::size_t>(i)] = k == 0 ? c2 : lo + (c2 - lo) * i / k;
  return b;
}

namespace {

Eigen::MatrixXd boundary_matrix(int k, const std::vector<double>& b) {
  Eigen::MatrixXd m(k + 1, k + 1);
  for (int j = 0; j <= k; ++j) {
    for (int i = 0; i <= k; ++i) m(j, i) = binom(k, j) * std::pow(b[static_cast<std::size_t>(i)] - 1.0, k - j);
  }
  return m;
}

}  // namespace

double peano_constant(int k, double c2) {
  const Eigen::MatrixXd m = boundary_matrix(k, peano_offsets(k, c2));
  const Eigen::MatrixXd inv = m.inverse();
  return std::max(1.0, inv.cwiseAbs().colwise().sum().maxCoeff());
}

PeanoResult peano_synthesis(const ProfileFunction& f, int k, const QuadraturePtr& quadrature, double c1,
                            double c2, int panel_order) {
  if (k < 0) throw DomainError("peano: k must be >= 0");
  if (!(c2 > 1.0)) throw DomainError("peano: c2 must exceed 1 so that sigma_k(x + b) is a polynomial");
  if (c1 > -1.0) throw DomainError("peano: kernel offsets -b for b in [-1, 1] need c1 <= -1");
  if (quadrature->dim() != 1) throw DomainError("peano: quadrature must be one-dimensional");

  PeanoResult out;
  out.boundary_offsets = peano_offsets(k, c2);
  const Eigen::MatrixXd m = boundary_matrix(k, out.boundary_offsets);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  out.vandermonde_condition = sv[0] / sv[sv.size() - 1];
  if (!(out.vandermonde_condition <= 1e12)) {
    std::ostringstream os;
    os << "peano: boundary system condition " << out.vandermonde_condition << " exceeds 1e12 (b =";
    for (double b : out.boundary_offsets) os << ' ' << b;
    os << ')';
    throw DomainError(os.str());
  }
  out.constant = peano_constant(k, c2);
  out.characterization = characterization_norm(f, k);

  Eigen::VectorXd taylor(k + 1);
  for (int j = 0; j <= k; ++j) taylor[j] = f.derivative_value(j, -1.0) / factorial(j);
  const Eigen::VectorXd a = m.fullPivLu().solve(taylor);
  const Eigen::VectorXd plus = Eigen::VectorXd::Constant(1, 1.0);
  for (int i = 0; i <= k; ++i) {
    if (a[i] == 0.0) continue;
    out.combination.push(RidgeAtom{k, plus, out.boundary_offsets[static_cast<std::size_t>(i)]}, a[i]);
    out.boundary_mass += std::abs(a[i]);
  }

  const double kf = factorial(k);
  if (f.is_piecewise()) {
    const auto& p = f.as_piecewise();
    if (p.degree() > k) throw DomainError("peano: piecewise input must have degree <= k");
    std::vector<PiecewisePolynomial> ders{p};
    for (int j = 1; j <= k; ++j) ders.push_back(ders.back().derivative());
    for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
      const double t = p.breakpoints[i];
      for (int j = 0; j < k; ++j) {
        const auto& d = ders[static_cast<std::size_t>(j)];
        const double jump = horner(d.pieces[i + 1], t) - horner(d.pieces[i], t);
        if (std::abs(jump) > 1e-10 * (1.0 + std::abs(horner(d.pieces[i], t)))) {
          throw DomainError("peano: derivative " + std::to_string(j) + " jumps at a breakpoint");
        }
      }
      const auto& dk = ders[static_cast<std::size_t>(k)];
      const double jump = horner(dk.pieces[i + 1], t) - horner(dk.pieces[i], t);
      if (jump == 0.0) continue;
      out.combination.push(RidgeAtom{k, plus, -t}, jump / kf);
      out.kernel_mass += std::abs(jump) / kf;
    }
  } else {
    if (f.order() < k + 1) throw DomainError("peano: smooth input needs derivative k+1");
    const auto& nodes = quadrature->nodes();
    std::vector<double> bp{-1.0, 1.0};
    for (Index i = 0; i < nodes.cols(); ++i) bp.push_back(std::clamp(nodes(0, i), -1.0, 1.0));
    std::sort(bp.begin(), bp.end());
    Eigen::VectorXd breaks = Eigen::Map<Eigen::VectorXd>(bp.data(), static_cast<Index>(bp.size()));
    Eigen::VectorXd bn, bw;
    composite_gauss(breaks, panel_order, bn, bw);
    for (Index q = 0; q < bn.size(); ++q) {
      const double c = bw[q] * f.derivative_value(k + 1, bn[q]) / kf;
      if (c == 0.0) continue;
      out.combination.push(RidgeAtom{k, plus, -bn[q]}, c);
      out.kernel_mass += std::abs(c);
    }
  }

  const RealFunction target = sample([&](const Eigen::VectorXd& x) { return f(x[0]); }, quadrature);
  out.residual = norm_l2(synth(out.combination, quadrature) - target);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<EquivalenceRow> equivalence_experiment(const std::vector<EquivalenceCase>& suite,
                                                   const EquivalenceOptions& options) {
  if (suite.empty()) throw DomainError("equivalence_experiment: empty suite");
  const BoxDomain domain = BoxDomain::cube(1, -1.0, 1.0);
  const auto q1 = build_quadrature(domain, options.level, QuadratureKind::TensorGauss);
  const auto q2 = build_quadrature(domain, 2 * options.level, QuadratureKind::TensorGauss);
  std::vector<EquivalenceRow> rows;
  for (const auto& c : suite) {
    EquivalenceRow row;
    row.id = c.f.id();
    row.k = c.k;
    try {
      DictionaryConfig cfg;
      cfg.family = Family::Ridge;
      cfg.domain = domain;
      cfg.k = c.k;
      cfg.c1 = options.c1;
      cfg.c2 = options.c2;
      cfg.grid = options.grid;
      row.characterization = characterization_norm(c.f, c.k);
      auto fn = [&](const Eigen::VectorXd& x) { return c.f(x[0]); };
      const auto r1 = variation_upper<RidgeAtom>(sample(fn, q1), cfg, options.solver);
      const auto r2 = variation_upper<RidgeAtom>(sample(fn, q2), cfg, options.solver);
      row.upper = r1.report.upper;
      row.refined_upper = r2.report.upper;
      row.ratio = row.upper / row.characterization;
      row.refinement_ratio = (row.refined_upper / row.characterization) / row.ratio;
      row.success = r1.report.success && r2.report.success;
      row.in_window = row.ratio >= 1.0 / options.window && row.ratio <= options.window;
      row.status = row.success ? (row.in_window ? "ok" : "outside window")
                               : "solver: " + (r1.report.success ? r2.report.status : r1.report.status);
    } catch (const std::exception& e) {
      row.success = false;
      row.status = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::string equivalence_csv(const std::vector<EquivalenceRow>& rows) {
  std::ostringstream os;
  os << "function_id,k,characterization_norm,variation_upper,ratio,refinement_ratio\n";
  for (const auto& r : rows) {
    os << r.id << ',' << r.k << ',' << format_double(r.characterization) << ',' << format_double(r.upper)
       << ',' << format_double(r.ratio) << ',' << format_double(r.refinement_ratio) << '\n';
  }
  return os.str();
}

ProfileFunction builtin_profile(const std::string& id) {
  using V = Eigen::VectorXd;
  auto vec = [](std::initializer_list<double> l) {
    V v(static_cast<Index>(l.size()));
    Index i = 0;
    for (double x : l) v[i++] = x;
    return v;
  };
  if (id == "relu1") return ProfileFunction::piecewise(id, truncated_power_sum(vec({0.0}), {{0.0, 1.0}}, 1));
  if (id == "relu2") return ProfileFunction::piecewise(id, truncated_power_sum(vec({0.0}), {{0.0, 1.0}}, 2));
  if (id == "heaviside") return ProfileFunction::piecewise(id, truncated_power_sum(vec({0.0}), {{0.0, 1.0}}, 0));
  if (id == "x") return ProfileFunction::piecewise(id, {{}, {vec({0.0, 1.0})}});
  if (id == "x2") return ProfileFunction::piecewise(id, {{}, {vec({0.0, 0.0, 1.0})}});
  if (id == "cubic") return ProfileFunction::piecewise(id, {{}, {vec({0.1, -0.5, 0.0, 1.0})}});
  if (id == "pwl3") {
    return ProfileFunction::piecewise(
        id, truncated_power_sum(vec({0.2, 0.5}), {{-0.5, 1.0}, {0.1, -2.0}, {0.6, 1.5}}, 1));
  }
  if (id == "pwq3") {
    return ProfileFunction::piecewise(
        id, truncated_power_sum(vec({0.1, -0.3, 0.5}), {{-0.4, 1.5}, {0.2, -2.0}, {0.7, 1.0}}, 2));
  }
  if (id == "exp") {
    std::vector<std::function<double(double)>> d(6, [](double x) { return std::exp(x); });
    return ProfileFunction::smooth(id, d);
  }
  if (id == "log2px") {
    // d^j/dx^j log(2+x) = (-1)^{j-1} (j-1)! (2+x)^{-j}
    std::vector<std::function<double(double)>> d{[](double x) { return std::log(2.0 + x); }};
    for (int j = 1; j <= 5; ++j) {
      const double c = (j % 2 == 1 ? 1.0 : -1.0) * factorial(j - 1);
      d.push_back([c, j](double x) { return c * std::pow(2.0 + x, -j); });
    }
    return ProfileFunction::smooth(id, d);
  }
  throw DomainError("unknown profile '" + id + "'");
}

std::vector<std::string> builtin_profile_ids() {
  return {"relu1", "relu2", "heaviside", "x", "x2", "cubic", "pwl3", "pwq3", "exp", "log2px"};
}

std::vector<EquivalenceCase> default_equivalence_suite() {
  std::vector<EquivalenceCase> s;
  for (const char* id : {"relu1", "x", "x2", "exp", "log2px", "pwl3"}) s.push_back({builtin_profile(id), 1});
  for (const char* id : {"relu2", "x", "cubic", "exp", "log2px", "pwq3"}) s.push_back({builtin_profile(id), 2});
  return s;
}

}  // namespace varspace
