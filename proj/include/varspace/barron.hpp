#pragma once

#include "varspace/combination.hpp"

namespace varspace {

/// Writes a Barron atom as a combination of P_1 atoms that agrees with it
/// exactly on the domain.
///
/// Cases, with nu = omega/|omega|_2 and beta = b/|omega|_2:
///   beta in [c1, c2]  one atom sigma_1(nu.x + beta)
///   beta < c1         empty (the atom vanishes on the domain)
///   beta > c2         the atom is affine on the domain; it is rebuilt from
///                     sigma_1(nu.x) - sigma_1(-nu.x) and the constant pair
///                     sigma_1(nu.x + c2) - sigma_1(nu.x + c2 - 1)
///   omega = 0         constant pair only (or empty when b < 0)
/// The resulting mass never exceeds 4.
///
/// Requires validate_offsets(domain, c1, c2) to pass and c2 - 1 > max |x|_2,
/// otherwise throws DomainError.
RidgeCombination decompose_barron_atom(const BarronAtom& atom, const BoxDomain& domain,
                                       double c1, double c2);

struct RidgeEmbedding {
  BarronAtom atom;
  double coefficient = 0.0;  ///< |omega|_1 + |b|
};

/// sigma_1(omega.x + b) = coefficient * barron_atom(x) with the same (omega, b).
/// Throws DomainError unless k == 1.
RidgeEmbedding embed_ridge_in_barron(const RidgeAtom& atom);

}  // namespace varspace
