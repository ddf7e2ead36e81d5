#pragma once

#include <string>

#include <json.hpp>

#include "varspace/combination.hpp"
#include "varspace/varnorm.hpp"

namespace varspace {

/// Shortest round-trip decimal is not what we want for reproducible files;
/// this always prints 17 significant digits, '.' as decimal point, no locale.
std::string format_double(double x);

/// Atom records: {"family": "ridge", "k": 1, "omega": [...], "b": 0.5},
/// {"family": "spectral", "s": 1, "xi": [...]}, {"family": "barron", "omega": [...], "b": ...}.
nlohmann::json to_json(const RidgeAtom& atom);
nlohmann::json to_json(const SpectralAtom& atom);
nlohmann::json to_json(const BarronAtom& atom);

RidgeAtom ridge_atom_from_json(const nlohmann::json& j);
SpectralAtom spectral_atom_from_json(const nlohmann::json& j);
BarronAtom barron_atom_from_json(const nlohmann::json& j);

/// {"atoms": [...], "coefficients": [...], "mass": M}; complex coefficients
/// are [re, im] pairs.
nlohmann::json to_json(const RidgeCombination& combination);
nlohmann::json to_json(const SpectralCombination& combination);
RidgeCombination ridge_combination_from_json(const nlohmann::json& j);
SpectralCombination spectral_combination_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EstimateReport& report);

/// Serializes with sorted keys and every float printed by format_double.
std::string dump_stable(const nlohmann::json& j, int indent = 2);

/// One row per solver iteration: iteration, residual, mass.
std::string history_csv(const EstimateReport& report);

}  // namespace varspace
