#include "varspace/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace varspace {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from(const json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw DomainError(std::string("atom record: missing array '") + field + "'");
  }
  const auto& a = j.at(field);
  Eigen::VectorXd v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Index>(i)] = a[i].get<double>();
  return v;
}

void expect_family(const json& j, const char* family) {
  if (!j.contains("family") || j.at("family").get<std::string>() != family) {
    throw DomainError(std::string("atom record: expected family '") + family + "'");
  }
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw DomainError("complex coefficient must be a number or [re, im]");
}

void write(std::ostringstream& os, const json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
        if (!first) os << ',' << nl;
        first = false;
        os << pad << json(it.key()).dump() << colon;
        write(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // numeric arrays stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && (e.is_number() || e.is_string() || e.is_boolean());
      os << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (flat ? ", " : ",");
        if (!flat) os << nl << pad;
        first = false;
        write(os, e, indent, depth + 1);
      }
      if (!flat) os << nl << close_pad;
      os << ']';
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        os << "null";
      } else {
        std::string s = format_double(x);
        if (s.find_first_of(".eE") == std::string::npos) s += ".0";
        os << s;
      }
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_stable(const json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  return os.str();
}

json to_json(const RidgeAtom& atom) {
  return {{"family", "ridge"}, {"k", atom.k}, {"omega", vec_json(atom.omega)}, {"b", atom.b}};
}

json to_json(const SpectralAtom& atom) {
  return {{"family", "spectral"}, {"s", atom.s}, {"xi", vec_json(atom.xi)}};
}

json to_json(const BarronAtom& atom) {
  return {{"family", "barron"}, {"omega", vec_json(atom.omega)}, {"b", atom.b}};
}

RidgeAtom ridge_atom_from_json(const json& j) {
  expect_family(j, "ridge");
  RidgeAtom a;
  a.k = j.at("k").get<int>();
  a.omega = vec_from(j, "omega");
  a.b = j.at("b").get<double>();
  if (std::abs(a.omega.norm() - 1.0) > 1e-12) throw DomainError("ridge atom: omega must be a unit vector");
  return a;
}

SpectralAtom spectral_atom_from_json(const json& j) {
  expect_family(j, "spectral");
  SpectralAtom a;
  a.s = j.at("s").get<double>();
  a.xi = vec_from(j, "xi");
  return a;
}

BarronAtom barron_atom_from_json(const json& j) {
  expect_family(j, "barron");
  BarronAtom a;
  a.omega = vec_from(j, "omega");
  a.b = j.at("b").get<double>();
  return a;
}

json to_json(const RidgeCombination& combination) {
  json atoms = json::array();
  json coefs = json::array();
  for (std::size_t i = 0; i < combination.size(); ++i) {
    atoms.push_back(to_json(combination.atoms[i]));
    coefs.push_back(combination.coefficients[i]);
  }
  return {{"atoms", atoms}, {"coefficients", coefs}, {"mass", combination.mass()}};
}

json to_json(const SpectralCombination& combination) {
  json atoms = json::array();
  json coefs = json::array();
  for (std::size_t i = 0; i < combination.size(); ++i) {
    atoms.push_back(to_json(combination.atoms[i]));
    coefs.push_back(complex_json(combination.coefficients[i]));
  }
  return {{"atoms", atoms}, {"coefficients", coefs}, {"mass", combination.mass()}};
}

RidgeCombination ridge_combination_from_json(const json& j) {
  RidgeCombination c;
  const auto& atoms = j.at("atoms");
  const auto& coefs = j.at("coefficients");
  if (atoms.size() != coefs.size()) throw DomainError("combination: atoms/coefficients length mismatch");
  for (std::size_t i = 0; i < atoms.size(); ++i) c.push(ridge_atom_from_json(atoms[i]), coefs[i].get<double>());
  return c;
}

SpectralCombination spectral_combination_from_json(const json& j) {
  SpectralCombination c;
  const auto& atoms = j.at("atoms");
  const auto& coefs = j.at("coefficients");
  if (atoms.size() != coefs.size()) throw DomainError("combination: atoms/coefficients length mismatch");
  for (std::size_t i = 0; i < atoms.size(); ++i) c.push(spectral_atom_from_json(atoms[i]), complex_from(coefs[i]));
  return c;
}

json to_json(const EstimateReport& r) {
  return {{"upper", r.upper},
          {"residual", r.residual},
          {"lower", r.lower},
          {"epsilon", r.epsilon},
          {"lambda", r.lambda},
          {"iterations", r.iterations},
          {"atom_count", r.atom_count},
          {"wall_seconds", r.wall_seconds},
          {"success", r.success},
          {"status", r.status}};
}

std::string history_csv(const EstimateReport& report) {
  std::ostringstream os;
  os << "iteration,residual,mass\n";
  for (const auto& h : report.history) {
    os << h.iteration << ',' << format_double(h.residual) << ',' << format_double(h.mass) << '\n';
  }
  return os.str();
}

}  // namespace varspace
