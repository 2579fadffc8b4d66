#pragma once

// Topological crystals given by a finite base graph with per-edge Z^d indices.
//
// The base elements are the fundamental domain: base vertex j lifts to the
// vertex (j, mu) of cell mu, base edge k lifts to mu.e_k running from
// (o_k, mu) to (t_k, mu + eta_k). Edges of the crystal are named by their
// entire part (the cell of their origin) together with the base oriented edge
// they cover; the reversal of mu.e_k is therefore (k, reversed, mu + eta_k).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cspec/graph.hpp"
#include "cspec/lattice.hpp"

namespace cspec {

struct BaseVertex {
  std::string name;
  double measure = 1.0;
  double potential = 0.0;

  friend bool operator==(const BaseVertex&, const BaseVertex&) = default;
};

struct BaseEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  LatticePoint eta;
  double measure = 1.0;
  double potential = 0.0;

  friend bool operator==(const BaseEdge&, const BaseEdge&) = default;
};

/// Serialized definition of a weighted topological crystal with a periodic potential.
/// `edges` is the positive orientation A+ of the base graph.
struct CrystalDescriptor {
  int dimension = 1;
  std::vector<BaseVertex> vertices;
  std::vector<BaseEdge> edges;

  friend bool operator==(const CrystalDescriptor&, const CrystalDescriptor&) = default;
};

struct CrystalVertex {
  std::size_t base = 0;
  LatticePoint cell;

  friend bool operator==(const CrystalVertex&, const CrystalVertex&) = default;
  friend std::strong_ordering operator<=>(const CrystalVertex&, const CrystalVertex&) = default;
};

/// An oriented edge of the crystal: the lift with entire part `cell` of base
/// edge `base`, or of its reversal when `reversed` is set.
struct CrystalEdge {
  std::size_t base = 0;
  bool reversed = false;
  LatticePoint cell;

  friend bool operator==(const CrystalEdge&, const CrystalEdge&) = default;
  friend std::strong_ordering operator<=>(const CrystalEdge&, const CrystalEdge&) = default;
};

/// Key of a vertex (j, mu) or of an unoriented edge through its positive lift mu.e_k.
struct CellKey {
  std::size_t base = 0;
  LatticePoint cell;

  friend bool operator==(const CellKey&, const CellKey&) = default;
  friend std::strong_ordering operator<=>(const CellKey&, const CellKey&) = default;
};

/// Finitely supported cochain on the crystal. Edge values are stored on positive lifts.
struct CrystalCochain {
  std::map<CellKey, Complex> vertex;
  std::map<CellKey, Complex> edge;

  Complex at_vertex(const CellKey& key) const;
  /// Value on an oriented edge, including the sign of a reversal.
  Complex at_edge(const CrystalEdge& e, const LatticePoint& eta) const;
  /// max |mu|_inf over the support, -1 when empty.
  std::int64_t support_radius() const;
};

/// Values on crystal vertices and unoriented edges, e.g. a measure or a potential.
class ElementField {
 public:
  virtual ~ElementField() = default;
  virtual double vertex(std::size_t base, const LatticePoint& cell) const = 0;
  /// Value on the unoriented edge whose positive lift is cell.e_base.
  virtual double edge(std::size_t base, const LatticePoint& cell) const = 0;
};

class Crystal {
 public:
  /// Validates the descriptor; throws ValidationError naming the offending field.
  static Crystal build(CrystalDescriptor descriptor);

  const CrystalDescriptor& descriptor() const noexcept { return desc_; }
  int dimension() const noexcept { return desc_.dimension; }
  std::size_t vertex_count() const noexcept { return desc_.vertices.size(); }
  std::size_t edge_count() const noexcept { return desc_.edges.size(); }
  /// n + l, the fiber dimension.
  std::size_t fiber_dimension() const noexcept { return vertex_count() + edge_count(); }

  const OrientedGraph& base_graph() const noexcept { return base_; }
  Measure base_measure() const;
  Potential base_potential() const;
  const LatticePoint& eta(std::size_t base_edge) const { return desc_.edges.at(base_edge).eta; }
  /// max_k |eta_k|_inf
  std::int64_t max_eta_norm() const noexcept { return max_eta_; }

  CrystalVertex origin(const CrystalEdge& e) const;
  CrystalVertex terminus(const CrystalEdge& e) const;
  CrystalEdge reversal(const CrystalEdge& e) const;
  /// eta(e) = [t(e)] - [o(e)], computed from the endpoints.
  LatticePoint edge_index(const CrystalEdge& e) const;
  /// Key of the unoriented edge underlying e.
  CellKey unoriented_key(const CrystalEdge& e) const;

  /// mu . x_j
  CrystalVertex lift_vertex(const LatticePoint& mu, std::size_t base_vertex) const;
  /// mu . e for a base oriented edge (2k or 2k+1 in base_graph() numbering).
  CrystalEdge lift_edge(const LatticePoint& mu, std::size_t base_oriented_edge) const;
  std::pair<LatticePoint, std::size_t> entire_part(const CrystalVertex& v) const;
  std::pair<LatticePoint, std::size_t> entire_part(const CrystalEdge& e) const;

  /// A_x for a crystal vertex, in the order of the base star A_{omega(x)}.
  std::vector<CrystalEdge> star(const CrystalVertex& v) const;

  double periodic_measure(const CrystalVertex& v) const { return desc_.vertices.at(v.base).measure; }

 private:
  CrystalDescriptor desc_;
  OrientedGraph base_;
  std::int64_t max_eta_ = 0;
};

/// Periodic measure m_Gamma or periodic potential R_Gamma seen as an ElementField.
class PeriodicMeasureField final : public ElementField {
 public:
  explicit PeriodicMeasureField(const Crystal& c) : c_(&c) {}
  double vertex(std::size_t base, const LatticePoint&) const override;
  double edge(std::size_t base, const LatticePoint&) const override;

 private:
  const Crystal* c_;
};

class PeriodicPotentialField final : public ElementField {
 public:
  explicit PeriodicPotentialField(const Crystal& c) : c_(&c) {}
  double vertex(std::size_t base, const LatticePoint&) const override;
  double edge(std::size_t base, const LatticePoint&) const override;

 private:
  const Crystal* c_;
};

/// The finite induced weighted graph on {x : |[x]|_inf <= radius}. Edges leaving
/// the ball are dropped.
struct Truncation {
  std::int64_t radius = 0;
  OrientedGraph graph;
  Measure measure;
  Potential potential;
  /// Crystal coordinates of graph vertex i and of the positive lift of graph edge k.
  std::vector<CellKey> vertices;
  std::vector<CellKey> edges;

  std::optional<std::size_t> vertex_index(const CellKey& key) const;
  std::optional<std::size_t> edge_index(const CellKey& key) const;

  /// Restriction of a crystal cochain; throws WindowError if it does not fit.
  Cochain restrict(const CrystalCochain& f) const;
  CrystalCochain extend(const Cochain& f) const;

  std::map<CellKey, std::size_t> vertex_lookup;
  std::map<CellKey, std::size_t> edge_lookup;
};

Truncation truncate(const Crystal& c, std::int64_t radius);
/// Truncation carrying an arbitrary measure and potential instead of the periodic ones.
Truncation truncate(const Crystal& c, std::int64_t radius, const ElementField& measure,
                    const ElementField& potential);

/// Catalog of standard crystals: "z1", "z2", "hexagonal", "ladder".
CrystalDescriptor standard_lattice(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace cspec
