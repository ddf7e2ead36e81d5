#pragma once

#include <cmath>
#include <vector>

#include "varspace/dictionaries.hpp"
#include "varspace/domain.hpp"

namespace varspace {

template <typename AtomT>
struct AtomScalar {
  using type = double;
};
template <>
struct AtomScalar<SpectralAtom> {
  using type = Complex;
};
template <typename AtomT>
using atom_scalar_t = typename AtomScalar<AtomT>::type;

/// Finitely many atoms with signed (or complex) weights. Also read as the
/// discrete measure sum_i a_i delta_{atom_i}, whose total variation is mass().
template <typename AtomT, typename Scalar = atom_scalar_t<AtomT>>
struct SparseCombination {
  using atom_type = AtomT;
  using scalar_type = Scalar;

  std::vector<AtomT> atoms;
  std::vector<Scalar> coefficients;

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }

  void push(AtomT atom, Scalar coefficient) {
    atoms.push_back(std::move(atom));
    coefficients.push_back(coefficient);
  }

  double mass() const {
    double m = 0.0;
    for (const auto& c : coefficients) m += std::abs(c);
    return m;
  }
};

using RidgeCombination = SparseCombination<RidgeAtom>;
using SpectralCombination = SparseCombination<SpectralAtom>;

/// Pointwise sum_i a_i atom_i(x) on an arbitrary point set.
template <typename AtomT, typename Scalar>
Vector<Scalar> evaluate(const SparseCombination<AtomT, Scalar>& combination, const Points& x) {
  Vector<Scalar> out = Vector<Scalar>::Zero(x.cols());
  for (std::size_t i = 0; i < combination.atoms.size(); ++i) {
    out += combination.coefficients[i] * eval_atom(combination.atoms[i], x).template cast<Scalar>();
  }
  return out;
}

/// The synthesized function of a combination on the quadrature nodes.
template <typename AtomT, typename Scalar>
GridFunction<Scalar> synth(const SparseCombination<AtomT, Scalar>& combination,
                           const QuadraturePtr& quadrature) {
  return {quadrature, evaluate(combination, quadrature->nodes())};
}

}  // namespace varspace
