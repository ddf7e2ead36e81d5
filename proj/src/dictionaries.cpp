#include "varspace/dictionaries.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "varspace/barron.hpp"

namespace varspace {

Eigen::VectorXd eval_ridge(const RidgeAtom& atom, const Points& x) {
  const Eigen::VectorXd t = (x.transpose() * atom.omega).array() + atom.b;
  return t.unaryExpr([k = atom.k](double v) { return relu_power(v, k); });
}

Eigen::VectorXcd eval_spectral(const SpectralAtom& atom, const Points& x) {
  const double scale = std::pow(1.0 + atom.xi.norm(), -atom.s);
  const Eigen::VectorXd phase = 2.0 * std::numbers::pi * (x.transpose() * atom.xi);
  Eigen::VectorXcd out(x.cols());
  for (Index j = 0; j < x.cols(); ++j) out[j] = std::polar(scale, phase[j]);
  return out;
}

Eigen::VectorXd eval_barron(const BarronAtom& atom, const Points& x) {
  const double scale = atom.omega.lpNorm<1>() + std::abs(atom.b);
  if (scale == 0.0) throw DomainError("eval_barron: (omega, b) must not both vanish");
  const Eigen::VectorXd t = (x.transpose() * atom.omega).array() + atom.b;
  return t.unaryExpr([scale](double v) { return relu_power(v, 1) / scale; });
}

Eigen::VectorXd eval_activation(const std::function<double(double)>& act,
                                const Eigen::VectorXd& omega, double b, const Points& x) {
  const Eigen::VectorXd t = (x.transpose() * omega).array() + b;
  return t.unaryExpr(act);
}

std::string to_string(Family f) {
  switch (f) {
    case Family::Ridge: return "ridge";
    case Family::Spectral: return "spectral";
    case Family::Barron: return "barron";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "ridge" || name == "P_k") return Family::Ridge;
  if (name == "spectral" || name == "F_s") return Family::Spectral;
  if (name == "barron" || name == "B") return Family::Barron;
  throw DomainError("unknown dictionary family '" + name + "'");
}

OffsetCheck validate_offsets(const BoxDomain& domain, double c1, double c2) {
  OffsetCheck check;
  const double r = domain.max_radius();
  check.inf_dot = -r;
  check.sup_dot = r;
  check.lower_margin = check.inf_dot - c1;
  check.upper_margin = c2 - check.sup_dot;
  check.ok = check.lower_margin > 0.0 && check.upper_margin > 0.0;
  return check;
}

void DictionaryConfig::validate() const {
  if (family == Family::Spectral) {
    if (s < 0.0) throw DomainError("dictionary: s must be nonnegative");
    if (!(grid.lattice_step > 0.0) || !(grid.lattice_radius >= 0.0)) {
      throw DomainError("dictionary: lattice step must be positive and radius nonnegative");
    }
    return;
  }
  if (k < 0) throw DomainError("dictionary: k must be nonnegative");
  const OffsetCheck check = validate_offsets(domain, c1, c2);
  if (!check.ok) {
    throw DomainError("dictionary: offsets must satisfy c1 < " + std::to_string(check.inf_dot) +
                      " and c2 > " + std::to_string(check.sup_dot));
  }
  if (grid.directions < 1 || grid.offsets < 1) {
    throw DomainError("dictionary: grid must have at least one direction and one offset");
  }
}

namespace {

double halton(std::uint64_t i, int base) {
  double f = 1.0 / base;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f /= base;
  }
  return r;
}

constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

}  // namespace

std::vector<Eigen::VectorXd> sphere_directions(int dim, int count) {
  std::vector<Eigen::VectorXd> dirs;
  if (dim == 1) {
    dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
    dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
    return dirs;
  }
  const int half = std::max(1, (count + 1) / 2);
  if (dim == 2) {
    const int n = 2 * half;
    for (int j = 0; j < n; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / n;
      Eigen::VectorXd w(2);
      w << std::cos(theta), std::sin(theta);
      dirs.push_back(w);
    }
    return dirs;
  }
  std::vector<Eigen::VectorXd> upper;
  if (dim == 3) {
    // Fibonacci spiral over the full sphere with 2*half points, keep the
    // half with z > 0 (the spiral is symmetric under negation up to ordering).
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < half; ++j) {
      const double z = 1.0 - (j + 0.5) / half;  // in (0, 1)
      const double r = std::sqrt(1.0 - z * z);
      const double phi = golden * j;
      Eigen::VectorXd w(3);
      w << r * std::cos(phi), r * std::sin(phi), z;
      upper.push_back(w);
    }
  } else {
    if (dim > 2 * static_cast<int>(std::size(kHaltonBases))) {
      throw DomainError("sphere_directions: dimension too large");
    }
    for (int j = 0; j < half; ++j) {
      Eigen::VectorXd w(dim);
      for (int i = 0; i < dim; i += 2) {
        const int pair = i / 2;
        const double u1 = halton(static_cast<std::uint64_t>(j + 1), kHaltonBases[2 * pair % 16]);
        const double u2 = halton(static_cast<std::uint64_t>(j + 1), kHaltonBases[(2 * pair + 1) % 16]);
        const double rad = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
        w[i] = rad * std::cos(2.0 * std::numbers::pi * u2);
        if (i + 1 < dim) w[i + 1] = rad * std::sin(2.0 * std::numbers::pi * u2);
      }
      upper.push_back(w.normalized());
    }
  }
  for (const auto& w : upper) dirs.push_back(w);
  for (const auto& w : upper) dirs.push_back(-w);
  return dirs;
}

namespace {

std::vector<double> offset_values(const DictionaryConfig& config) {
  std::vector<double> bs;
  const int n = config.grid.offsets;
  if (n == 1) {
    bs.push_back(0.5 * (config.c1 + config.c2));
    return bs;
  }
  for (int i = 0; i < n; ++i) bs.push_back(config.c1 + (config.c2 - config.c1) * i / (n - 1));
  return bs;
}

}  // namespace

std::vector<RidgeAtom> ridge_grid(const DictionaryConfig& config) {
  config.validate();
  std::vector<RidgeAtom> atoms;
  const auto dirs = sphere_directions(config.domain.dim(), config.grid.directions);
  const auto bs = offset_values(config);
  for (const auto& w : dirs) {
    for (double b : bs) atoms.push_back({config.k, w, b});
  }
  return atoms;
}

std::vector<BarronAtom> barron_grid(const DictionaryConfig& config) {
  std::vector<BarronAtom> atoms;
  for (const auto& r : ridge_grid(config)) {
    if (r.b == 0.0 && r.omega.isZero()) continue;
    atoms.push_back({r.omega, r.b});
  }
  return atoms;
}

std::vector<SpectralAtom> spectral_grid(const DictionaryConfig& config) {
  config.validate();
  const int d = config.domain.dim();
  const double h = config.grid.lattice_step;
  const int m = static_cast<int>(std::floor(config.grid.lattice_radius / h + 1e-9));
  std::vector<SpectralAtom> atoms;
  std::vector<int> idx(d, -m);
  while (true) {
    Eigen::VectorXd xi(d);
    for (int i = 0; i < d; ++i) xi[i] = h * idx[i];
    if (xi.norm() <= config.grid.lattice_radius * (1.0 + 1e-12)) atoms.push_back({config.s, xi});
    int i = d - 1;
    while (i >= 0 && idx[i] == m) {
      idx[i] = -m;
      --i;
    }
    if (i < 0) break;
    ++idx[i];
  }
  if (atoms.empty()) throw DomainError("spectral_grid: empty lattice");
  return atoms;
}

std::vector<Atom> grid_atoms(const DictionaryConfig& config) {
  std::vector<Atom> out;
  switch (config.family) {
    case Family::Ridge:
      for (auto& a : ridge_grid(config)) out.emplace_back(std::move(a));
      break;
    case Family::Spectral:
      for (auto& a : spectral_grid(config)) out.emplace_back(std::move(a));
      break;
    case Family::Barron:
      for (auto& a : barron_grid(config)) out.emplace_back(std::move(a));
      break;
  }
  if (out.empty()) throw DomainError("grid_atoms: empty grid");
  return out;
}

double atom_norm_sup(const DictionaryConfig& config, const Quadrature& quadrature) {
  const auto& w = quadrature.weights();
  double best = 0.0;
  for (const auto& atom : grid_atoms(config)) {
    const double n2 = std::visit(
        [&](const auto& a) { return (w.array() * eval_atom(a, quadrature.nodes()).array().abs2()).sum(); },
        atom);
    best = std::max(best, n2);
  }
  return std::sqrt(best);
}

double atom_norm_bound(const DictionaryConfig& config, const Quadrature& quadrature) {
  return kAtomNormSafety * atom_norm_sup(config, quadrature);
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& atom_values, const Quadrature& quadrature) {
  return atom_values.transpose() * quadrature.weights().asDiagonal() * atom_values;
}

int gram_rank(const Eigen::MatrixXd& atom_values, const Quadrature& quadrature, double tolerance) {
  if (atom_values.cols() == 0) throw DomainError("gram_rank: no atoms");
  const Eigen::MatrixXd g = gram_matrix(atom_values, quadrature);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0;
  return static_cast<int>((ev.array() > tolerance * top).count());
}

int gram_rank(const std::vector<RidgeAtom>& atoms, const Quadrature& quadrature, double tolerance) {
  Eigen::MatrixXd values(quadrature.size(), static_cast<Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    values.col(static_cast<Index>(i)) = eval_ridge(atoms[i], quadrature.nodes());
  }
  return gram_rank(values, quadrature, tolerance);
}

std::vector<double> sigmoid_heaviside_limit(const std::vector<double>& rs,
                                            const QuadraturePtr& quadrature) {
  std::vector<double> out;
  out.reserve(rs.size());
  for (double r : rs) {
    const RealFunction diff = sample(
        [r](const Eigen::VectorXd& x) {
          if (std::isinf(r)) return 0.0;
          return relu_power(x[0], 0) - logistic(r * x[0]);
        },
        quadrature);
    out.push_back(norm_l2(diff));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Barron <-> P_1 constructions

RidgeCombination decompose_barron_atom(const BarronAtom& atom, const BoxDomain& domain,
                                       double c1, double c2) {
  const OffsetCheck check = validate_offsets(domain, c1, c2);
  if (!check.ok) throw DomainError("decompose_barron_atom: offsets do not enclose the domain");
  if (!(c2 - 1.0 > check.sup_dot)) {
    throw DomainError("decompose_barron_atom: need c2 - 1 > max |x|_2 for the constant pair");
  }
  const int d = domain.dim();
  const double l1 = atom.omega.lpNorm<1>() + std::abs(atom.b);
  if (l1 == 0.0) throw DomainError("decompose_barron_atom: (omega, b) must not both vanish");

  RidgeCombination out;
  const double l2 = atom.omega.norm();
  if (l2 == 0.0) {
    // constant sigma_1(b)/|b|: 1 for b > 0, 0 otherwise
    if (atom.b > 0.0) {
      const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(d, 0);
      out.push({1, e1, c2}, 1.0);
      out.push({1, e1, c2 - 1.0}, -1.0);
    }
    return out;
  }
  const Eigen::VectorXd nu = atom.omega / l2;
  const double beta = atom.b / l2;
  if (beta < c1) return out;
  if (beta <= c2) {
    out.push({1, nu, beta}, l2 / l1);
    return out;
  }
  // beta > c2: omega.x + b > 0 on the domain, so the atom equals
  // (l2 / l1) nu.x + b / l1 there.
  const double slope = l2 / l1;
  const double constant = atom.b / l1;
  out.push({1, nu, 0.0}, slope);
  out.push({1, -nu, 0.0}, -slope);
  out.push({1, nu, c2}, constant);
  out.push({1, nu, c2 - 1.0}, -constant);
  return out;
}

RidgeEmbedding embed_ridge_in_barron(const RidgeAtom& atom) {
  if (atom.k != 1) throw DomainError("embed_ridge_in_barron: only k = 1 atoms embed");
  RidgeEmbedding e;
  e.atom = {atom.omega, atom.b};
  e.coefficient = atom.omega.lpNorm<1>() + std::abs(atom.b);
  return e;
}

}  // namespace varspace
