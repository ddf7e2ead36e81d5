#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "varspace/dictionaries.hpp"
#include "varspace/varnorm.hpp"

namespace varspace::cli {

/// A configuration problem at a JSON path such as "solver.max_atoms".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Strict view of a JSON object: every key must be consumed before finish().
class Section {
 public:
  Section(const nlohmann::json& j, std::string path);

  bool has(const std::string& key) const;
  Section child(const std::string& key);
  const nlohmann::json& raw(const std::string& key);

  double number(const std::string& key, double fallback);
  double number(const std::string& key);
  int integer(const std::string& key, int fallback);
  std::uint64_t seed(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  std::vector<int> integers(const std::string& key, const std::vector<int>& fallback);

  /// Throws ConfigError naming the first unknown key.
  void finish() const;
  std::string path_of(const std::string& key) const;

 private:
  const nlohmann::json& at(const std::string& key);

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> used_;
};

struct QuadratureSpec {
  QuadratureKind kind = QuadratureKind::TensorGauss;
  int level = 32;
};

/// Fields shared by every experiment.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  DictionaryConfig dictionary;
  QuadratureSpec quadrature;
  SolverOptions solver;
  std::string output_dir;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json source;
};

/// Reads the common sections; `params` is kept raw for the command to parse
/// strictly. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j, const std::string& expected_experiment);

/// Reads and parses a file; JSON syntax errors become ConfigError at path "".
nlohmann::json load_json(const std::string& path);

DictionaryConfig parse_dictionary(Section s);
BoxDomain parse_domain(Section s);
QuadratureSpec parse_quadrature(Section s);
SolverOptions parse_solver(Section s);

/// FNV-1a 64 of the compact stable serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

}  // namespace varspace::cli
