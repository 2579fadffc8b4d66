#pragma once

// Non-periodic measures and potentials on a crystal, and the perturbed
// Gauss-Bonnet operator H = J D(X,m) J^* + R acting on l^2(X, m_Gamma).
//
// A profile is a finite table of per-element values plus radial laws
// a (1 + |mu|)^{-p}. Measure laws act as multipliers 1 + a (1 + |mu|)^{-p};
// all multipliers touching an element are multiplied together.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspec/crystal.hpp"

namespace cspec {

enum class ElementKind { vertex, edge };

/// A base vertex or a base edge (positive orientation).
struct BaseElement {
  ElementKind kind = ElementKind::vertex;
  std::size_t index = 0;

  friend bool operator==(const BaseElement&, const BaseElement&) = default;
};

/// Value attached to the lift mu.element.
struct ElementValue {
  BaseElement element;
  LatticePoint mu;
  double value = 0.0;
};

enum class LawTarget { all, vertices, edges };

/// a (1 + |mu|_inf)^{-p} on the selected elements.
struct RadialLaw {
  LawTarget target = LawTarget::all;
  std::optional<std::size_t> index;  // restricts to one base vertex / edge
  double amplitude = 0.0;
  double exponent = 0.0;

  bool applies(ElementKind kind, std::size_t base) const;
  double at(const LatticePoint& mu) const;
};

struct PerturbationProfile {
  std::vector<ElementValue> measure_multipliers;
  std::vector<RadialLaw> measure_laws;
  std::vector<ElementValue> short_range;
  std::vector<RadialLaw> short_range_laws;
  std::vector<ElementValue> long_range;
  std::vector<RadialLaw> long_range_laws;

  /// Largest |mu| among table entries, -1 when there are none.
  std::int64_t table_radius() const;
  bool has_laws() const;
  /// Checks indices against the crystal and positivity of every multiplier.
  void validate(const Crystal& c) const;
};

/// Sum of a table and radial laws, zero elsewhere.
class ProfileField final : public ElementField {
 public:
  ProfileField(std::vector<ElementValue> table, std::vector<RadialLaw> laws);
  double vertex(std::size_t base, const LatticePoint& cell) const override;
  double edge(std::size_t base, const LatticePoint& cell) const override;

 private:
  double value(ElementKind kind, std::size_t base, const LatticePoint& cell) const;
  std::map<std::tuple<int, std::size_t, LatticePoint>, double> table_;
  std::vector<RadialLaw> laws_;
};

/// m = m_Gamma times the profile multipliers.
class PerturbedMeasure final : public ElementField {
 public:
  PerturbedMeasure(const Crystal& c, const PerturbationProfile& profile);
  /// The periodic measure itself.
  explicit PerturbedMeasure(const Crystal& c);
  double vertex(std::size_t base, const LatticePoint& cell) const override;
  double edge(std::size_t base, const LatticePoint& cell) const override;
  double multiplier(ElementKind kind, std::size_t base, const LatticePoint& cell) const;

 private:
  const Crystal* c_;
  std::map<std::tuple<int, std::size_t, LatticePoint>, double> table_;
  std::vector<RadialLaw> laws_;
};

/// R = R_Gamma + R_S + R_L.
class PotentialSplit {
 public:
  PotentialSplit(const Crystal& c, const PerturbationProfile& profile);
  /// R = R_Gamma.
  explicit PotentialSplit(const Crystal& c);

  const ElementField& periodic() const { return periodic_; }
  const ElementField& short_range() const { return *short_; }
  const ElementField& long_range() const { return *long_; }
  /// The full potential R.
  const ElementField& total() const { return *total_; }

 private:
  class Total;
  PeriodicPotentialField periodic_;
  std::shared_ptr<ProfileField> short_;
  std::shared_ptr<ProfileField> long_;
  std::shared_ptr<ElementField> total_;
};

/// H f for a finitely supported f, using the kernels of J D(X,m) J^* - D(X,m_Gamma)
/// added to D(X,m_Gamma) f and R f. Throws WindowError when supp f extended by the
/// edge reach exceeds `window`.
CrystalCochain apply_perturbed_H(const Crystal& c, const ElementField& m, const ElementField& r,
                                 const CrystalCochain& f, std::int64_t window);
/// H_0 f = (D(X, m_Gamma) + R_Gamma) f.
CrystalCochain apply_periodic_H0(const Crystal& c, const CrystalCochain& f, std::int64_t window);

/// Shortest path in the crystal between two vertices, as oriented edges.
/// Searches boxes of growing radius up to `max_radius`; throws ConfigurationError if none.
std::vector<CrystalEdge> find_path(const Crystal& c, const CrystalVertex& from, const CrystalVertex& to,
                                   std::int64_t max_radius = 8);

/// Fixed path from x_from (cell 0) to the target vertex, or to o(e) for an edge target.
struct TelescopePath {
  std::vector<CrystalEdge> edges;
  std::optional<std::size_t> final_edge;  // set for an edge target
};
TelescopePath telescope_path(const Crystal& c, std::size_t from_vertex, BaseElement target);

/// Bound on |R_L(mu.target) - R_L(mu.x_from)|:
/// sum_{e in alpha} |R_L(t(mu e)) - R_L(mu e)| + |R_L(mu e) - R_L(o(mu e))|, plus
/// |R_L(mu e) - R_L(o(mu e))| for an edge target.
double path_telescope(const Crystal& c, const ElementField& r_l, const TelescopePath& path, const LatticePoint& mu);
double path_telescope(const Crystal& c, const ElementField& r_l, std::size_t from_vertex, BaseElement target,
                      const LatticePoint& mu);

nlohmann::json profile_to_json(const PerturbationProfile& p);
/// Throws ValidationError naming the offending JSON path.
PerturbationProfile profile_from_json(const nlohmann::json& j, int dimension);
PerturbationProfile load_profile(const std::string& path, int dimension);

}  // namespace cspec
