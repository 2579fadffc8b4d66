#include "cspec/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cspec/errors.hpp"

namespace cspec {

namespace {

std::string edge_field(std::size_t k, const char* what) {
  return "edges[" + std::to_string(k) + "]." + what;
}

std::string vertex_field(std::size_t j, const char* what) {
  return "vertices[" + std::to_string(j) + "]." + what;
}

}  // namespace

Complex CrystalCochain::at_vertex(const CellKey& key) const {
  auto it = vertex.find(key);
  return it == vertex.end() ? Complex{} : it->second;
}

Complex CrystalCochain::at_edge(const CrystalEdge& e, const LatticePoint& eta) const {
  if (!e.reversed) {
    auto it = edge.find(CellKey{e.base, e.cell});
    return it == edge.end() ? Complex{} : it->second;
  }
  auto it = edge.find(CellKey{e.base, e.cell - eta});
  return it == edge.end() ? Complex{} : -it->second;
}

std::int64_t CrystalCochain::support_radius() const {
  std::int64_t r = -1;
  for (const auto& [k, v] : vertex) {
    if (v != Complex{}) r = std::max(r, k.cell.sup_norm());
  }
  for (const auto& [k, v] : edge) {
    if (v != Complex{}) r = std::max(r, k.cell.sup_norm());
  }
  return r;
}

Crystal Crystal::build(CrystalDescriptor d) {
  if (d.dimension < 1 || d.dimension > kMaxDimension) {
    throw ValidationError("dimension", "must lie in [1, " + std::to_string(kMaxDimension) + "]");
  }
  if (d.vertices.empty()) throw ValidationError("vertices", "at least one base vertex is required");
  if (d.edges.empty()) throw ValidationError("edges", "at least one base edge is required");

  std::set<std::string> names;
  for (std::size_t j = 0; j < d.vertices.size(); ++j) {
    const auto& v = d.vertices[j];
    if (!(v.measure > 0.0) || !std::isfinite(v.measure)) {
      throw ValidationError(vertex_field(j, "measure"), "must be positive (full support)");
    }
    if (!std::isfinite(v.potential)) throw ValidationError(vertex_field(j, "potential"), "must be finite");
    if (!v.name.empty() && !names.insert(v.name).second) {
      throw ValidationError(vertex_field(j, "name"), "duplicate vertex name '" + v.name + "'");
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> ends;
  ends.reserve(d.edges.size());
  std::int64_t max_eta = 0;
  for (std::size_t k = 0; k < d.edges.size(); ++k) {
    const auto& e = d.edges[k];
    if (e.from >= d.vertices.size()) throw ValidationError(edge_field(k, "from"), "vertex index out of range");
    if (e.to >= d.vertices.size()) throw ValidationError(edge_field(k, "to"), "vertex index out of range");
    if (e.eta.dimension() != d.dimension) {
      throw ValidationError(edge_field(k, "eta"), "has " + std::to_string(e.eta.dimension()) +
                                                      " components, expected " + std::to_string(d.dimension));
    }
    if (!(e.measure > 0.0) || !std::isfinite(e.measure)) {
      throw ValidationError(edge_field(k, "measure"), "must be positive (full support)");
    }
    if (!std::isfinite(e.potential)) throw ValidationError(edge_field(k, "potential"), "must be finite");
    ends.emplace_back(e.from, e.to);
    max_eta = std::max(max_eta, e.eta.sup_norm());
  }

  Crystal c;
  c.base_ = OrientedGraph(d.vertices.size(), std::move(ends));
  c.desc_ = std::move(d);
  c.max_eta_ = max_eta;
  return c;
}

Measure Crystal::base_measure() const {
  Measure m;
  for (const auto& v : desc_.vertices) m.vertex.push_back(v.measure);
  for (const auto& e : desc_.edges) m.edge.push_back(e.measure);
  return m;
}

Potential Crystal::base_potential() const {
  Potential r;
  for (const auto& v : desc_.vertices) r.vertex.push_back(v.potential);
  for (const auto& e : desc_.edges) r.edge.push_back(e.potential);
  return r;
}

CrystalVertex Crystal::origin(const CrystalEdge& e) const {
  const auto& b = desc_.edges.at(e.base);
  return {e.reversed ? b.to : b.from, e.cell};
}

CrystalVertex Crystal::terminus(const CrystalEdge& e) const {
  const auto& b = desc_.edges.at(e.base);
  if (e.reversed) return {b.from, e.cell - b.eta};
  return {b.to, e.cell + b.eta};
}

CrystalEdge Crystal::reversal(const CrystalEdge& e) const {
  const auto& b = desc_.edges.at(e.base);
  if (e.reversed) return {e.base, false, e.cell - b.eta};
  return {e.base, true, e.cell + b.eta};
}

LatticePoint Crystal::edge_index(const CrystalEdge& e) const { return terminus(e).cell - origin(e).cell; }

CellKey Crystal::unoriented_key(const CrystalEdge& e) const {
  if (e.reversed) return {e.base, e.cell - eta(e.base)};
  return {e.base, e.cell};
}

CrystalVertex Crystal::lift_vertex(const LatticePoint& mu, std::size_t base_vertex) const {
  if (base_vertex >= vertex_count()) throw LookupError("unknown base vertex " + std::to_string(base_vertex));
  if (mu.dimension() != dimension()) throw ShapeError("lattice point dimension mismatch");
  return {base_vertex, mu};
}

CrystalEdge Crystal::lift_edge(const LatticePoint& mu, std::size_t base_oriented_edge) const {
  if (base_oriented_edge >= 2 * edge_count()) {
    throw LookupError("unknown base oriented edge " + std::to_string(base_oriented_edge));
  }
  if (mu.dimension() != dimension()) throw ShapeError("lattice point dimension mismatch");
  return {OrientedGraph::unoriented(base_oriented_edge), (base_oriented_edge & 1U) != 0, mu};
}

std::pair<LatticePoint, std::size_t> Crystal::entire_part(const CrystalVertex& v) const {
  return {v.cell, v.base};
}

std::pair<LatticePoint, std::size_t> Crystal::entire_part(const CrystalEdge& e) const {
  return {e.cell, 2 * e.base + (e.reversed ? 1U : 0U)};
}

std::vector<CrystalEdge> Crystal::star(const CrystalVertex& v) const {
  std::vector<CrystalEdge> out;
  for (std::size_t oe : base_.outgoing(v.base)) out.push_back(lift_edge(v.cell, oe));
  return out;
}

double PeriodicMeasureField::vertex(std::size_t base, const LatticePoint&) const {
  return c_->descriptor().vertices.at(base).measure;
}
double PeriodicMeasureField::edge(std::size_t base, const LatticePoint&) const {
  return c_->descriptor().edges.at(base).measure;
}
double PeriodicPotentialField::vertex(std::size_t base, const LatticePoint&) const {
  return c_->descriptor().vertices.at(base).potential;
}
double PeriodicPotentialField::edge(std::size_t base, const LatticePoint&) const {
  return c_->descriptor().edges.at(base).potential;
}

std::optional<std::size_t> Truncation::vertex_index(const CellKey& key) const {
  auto it = vertex_lookup.find(key);
  if (it == vertex_lookup.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Truncation::edge_index(const CellKey& key) const {
  auto it = edge_lookup.find(key);
  if (it == edge_lookup.end()) return std::nullopt;
  return it->second;
}

Cochain Truncation::restrict(const CrystalCochain& f) const {
  Cochain out = Cochain::zero(graph);
  for (const auto& [key, value] : f.vertex) {
    auto i = vertex_index(key);
    if (!i) {
      if (value == Complex{}) continue;
      throw WindowError("vertex " + std::to_string(key.base) + key.cell.to_string() +
                        " lies outside the truncation of radius " + std::to_string(radius));
    }
    out.vertex(static_cast<Eigen::Index>(*i)) = value;
  }
  for (const auto& [key, value] : f.edge) {
    auto i = edge_index(key);
    if (!i) {
      if (value == Complex{}) continue;
      throw WindowError("edge " + std::to_string(key.base) + key.cell.to_string() +
                        " lies outside the truncation of radius " + std::to_string(radius));
    }
    out.edge(static_cast<Eigen::Index>(*i)) = value;
  }
  return out;
}

CrystalCochain Truncation::extend(const Cochain& f) const {
  if (static_cast<std::size_t>(f.vertex.size()) != vertices.size() ||
      static_cast<std::size_t>(f.edge.size()) != edges.size()) {
    throw ShapeError("cochain does not match the truncation");
  }
  CrystalCochain out;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (f.vertex(static_cast<Eigen::Index>(i)) != Complex{}) out.vertex[vertices[i]] = f.vertex(static_cast<Eigen::Index>(i));
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (f.edge(static_cast<Eigen::Index>(k)) != Complex{}) out.edge[edges[k]] = f.edge(static_cast<Eigen::Index>(k));
  }
  return out;
}

Truncation truncate(const Crystal& c, std::int64_t radius) {
  PeriodicMeasureField m(c);
  PeriodicPotentialField r(c);
  return truncate(c, radius, m, r);
}

Truncation truncate(const Crystal& c, std::int64_t radius, const ElementField& measure,
                    const ElementField& potential) {
  if (radius < 0) throw std::invalid_argument("truncation radius must be non-negative");
  Truncation t;
  t.radius = radius;
  const auto cells = box_points(c.dimension(), radius);
  const std::size_t n = c.vertex_count();
  const std::size_t l = c.edge_count();

  t.vertices.reserve(cells.size() * n);
  for (const auto& mu : cells) {
    for (std::size_t j = 0; j < n; ++j) {
      t.vertex_lookup.emplace(CellKey{j, mu}, t.vertices.size());
      t.vertices.push_back({j, mu});
      t.measure.vertex.push_back(measure.vertex(j, mu));
      t.potential.vertex.push_back(potential.vertex(j, mu));
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> ends;
  for (const auto& mu : cells) {
    for (std::size_t k = 0; k < l; ++k) {
      const auto& be = c.descriptor().edges[k];
      LatticePoint end_cell = mu + be.eta;
      if (end_cell.sup_norm() > radius) continue;
      std::size_t o = t.vertex_lookup.at(CellKey{be.from, mu});
      std::size_t tt = t.vertex_lookup.at(CellKey{be.to, end_cell});
      t.edge_lookup.emplace(CellKey{k, mu}, t.edges.size());
      t.edges.push_back({k, mu});
      ends.emplace_back(o, tt);
      t.measure.edge.push_back(measure.edge(k, mu));
      t.potential.edge.push_back(potential.edge(k, mu));
    }
  }
  t.graph = OrientedGraph(t.vertices.size(), std::move(ends));
  t.measure.validate(t.graph);
  return t;
}

namespace {

BaseEdge unit_edge(std::size_t from, std::size_t to, LatticePoint eta) {
  return BaseEdge{from, to, std::move(eta), 1.0, 0.0};
}

}  // namespace

CrystalDescriptor standard_lattice(const std::string& name) {
  CrystalDescriptor d;
  if (name == "z1") {
    d.dimension = 1;
    d.vertices = {{"x", 1.0, 0.0}};
    d.edges = {unit_edge(0, 0, LatticePoint{1})};
  } else if (name == "z2") {
    d.dimension = 2;
    d.vertices = {{"x", 1.0, 0.0}};
    d.edges = {unit_edge(0, 0, LatticePoint{1, 0}), unit_edge(0, 0, LatticePoint{0, 1})};
  } else if (name == "hexagonal") {
    d.dimension = 2;
    d.vertices = {{"a", 1.0, 0.0}, {"b", 1.0, 0.0}};
    d.edges = {unit_edge(0, 1, LatticePoint{0, 0}), unit_edge(0, 1, LatticePoint{1, 0}),
               unit_edge(0, 1, LatticePoint{0, 1})};
  } else if (name == "ladder") {
    d.dimension = 1;
    d.vertices = {{"a", 1.0, 0.0}, {"b", 1.0, 0.0}};
    d.edges = {unit_edge(0, 0, LatticePoint{1}), unit_edge(1, 1, LatticePoint{1}),
               unit_edge(0, 1, LatticePoint{0})};
  } else {
    throw CatalogError("unknown lattice '" + name + "'; known: z1, z2, hexagonal, ladder");
  }
  return d;
}

std::vector<std::string> catalog_names() { return {"z1", "z2", "hexagonal", "ladder"}; }

}  // namespace cspec
