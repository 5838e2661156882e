// jobspec.hpp
// Self-describing JSON job files ("schema": "kstab/1"). Rationals are written
// as "p/q" or integer strings (JSON integers are accepted on input); floats are
// rejected wherever an exact value is expected.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kstab/polytope.hpp"
#include "kstab/rootsystem.hpp"

namespace kstab {

inline constexpr const char* kSchema = "kstab/1";

struct RootSystemSpec {
  std::optional<Series> series;
  int rank = 0;
  std::optional<ZMatrix> cartan;

  RootSystem build() const;
};

struct PolytopeSpec {
  std::vector<QVector> vertices;
  std::vector<Halfspace> halfspaces;

  RationalPolytope build() const;
};

struct PotentialSpec {
  bool canonical = true;
  /// Polynomial perturbation; arity 0 means zero.
  QPolynomial g;
};

struct JobOptions {
  std::vector<std::int64_t> kset;
  std::optional<std::int64_t> kmax;
  std::optional<std::string> a_preset;
  std::optional<int> quad_depth;
  std::optional<Rational> quad_ratio;
  std::optional<double> tolerance;
};

struct JobSpec {
  std::optional<RootSystemSpec> root_system;
  PolytopeSpec polytope;
  std::optional<std::vector<AffinePiece>> f;
  std::optional<Rational> R;
  std::optional<QPolynomial> h;
  std::optional<PotentialSpec> potential;
  JobOptions options;

  RootSystem build_root_system() const;
  PiecewiseAffine build_f() const;
};

/// Throws InputError naming the offending field.
JobSpec parse_job(const nlohmann::json& j);
/// Also reports JSON syntax errors with their position.
JobSpec parse_job_text(const std::string& text);
JobSpec load_job(const std::string& path);
nlohmann::json to_json(const JobSpec& spec);

PotentialSpec parse_potential(const nlohmann::json& j, const std::string& where = "potential");
PotentialSpec load_potential(const std::string& path);
nlohmann::json to_json(const PotentialSpec& spec);

QPolynomial parse_polynomial(const nlohmann::json& j, int nvars, const std::string& where);
nlohmann::json to_json(const QPolynomial& p);

Rational parse_rational_field(const nlohmann::json& j, const std::string& where);

/// Parses "1,2,3" into integers; throws InputError.
std::vector<long> parse_int_list(const std::string& text, const std::string& what);

}  // namespace kstab
