#include "cspec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cspec/errors.hpp"

namespace cspec {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_sizes(const OrientedGraph& g, const VectorC& f0, const VectorC* f1) {
  if (static_cast<std::size_t>(f0.size()) != g.vertex_count()) {
    throw ShapeError("0-cochain has " + std::to_string(f0.size()) + " entries, graph has " +
                     std::to_string(g.vertex_count()) + " vertices");
  }
  if (f1 && static_cast<std::size_t>(f1->size()) != g.edge_count()) {
    throw ShapeError("1-cochain has " + std::to_string(f1->size()) + " entries, graph has " +
                     std::to_string(g.edge_count()) + " edges");
  }
}

void check_edge_part(const OrientedGraph& g, const VectorC& f1) {
  if (static_cast<std::size_t>(f1.size()) != g.edge_count()) {
    throw ShapeError("1-cochain has " + std::to_string(f1.size()) + " entries, graph has " +
                     std::to_string(g.edge_count()) + " edges");
  }
}

// sum_{e in A_x} m(e)/m(x) f(e), the common piece of d* and Delta_1.
Complex star_sum(const OrientedGraph& g, const Measure& m, const VectorC& f1, std::size_t x) {
  Complex s{0.0, 0.0};
  for (std::size_t oe : g.outgoing(x)) {
    std::size_t k = OrientedGraph::unoriented(oe);
    s += (m.edge[k] / m.vertex[x]) * OrientedGraph::orientation_sign(oe) * f1(idx(k));
  }
  return s;
}

}  // namespace

OrientedGraph::OrientedGraph(std::size_t vertex_count,
                             std::vector<std::pair<std::size_t, std::size_t>> edges)
    : vertex_count_(vertex_count), ends_(std::move(edges)), outgoing_(vertex_count) {
  for (std::size_t k = 0; k < ends_.size(); ++k) {
    auto [o, t] = ends_[k];
    if (o >= vertex_count_ || t >= vertex_count_) {
      throw ValidationError("edges[" + std::to_string(k) + "]", "endpoint outside vertex range");
    }
    outgoing_[o].push_back(2 * k);
    outgoing_[t].push_back(2 * k + 1);
  }
}

std::size_t OrientedGraph::origin(std::size_t oriented) const {
  const auto& e = ends_.at(unoriented(oriented));
  return (oriented & 1U) ? e.second : e.first;
}

std::size_t OrientedGraph::terminus(std::size_t oriented) const {
  const auto& e = ends_.at(unoriented(oriented));
  return (oriented & 1U) ? e.first : e.second;
}

const std::vector<std::size_t>& OrientedGraph::outgoing(std::size_t vertex) const {
  if (vertex >= vertex_count_) throw LookupError("unknown vertex " + std::to_string(vertex));
  return outgoing_[vertex];
}

Measure Measure::uniform(const OrientedGraph& g, double value) {
  return {std::vector<double>(g.vertex_count(), value), std::vector<double>(g.edge_count(), value)};
}

void Measure::validate(const OrientedGraph& g) const {
  if (vertex.size() != g.vertex_count()) throw ValidationError("measure.vertex", "size mismatch");
  if (edge.size() != g.edge_count()) throw ValidationError("measure.edge", "size mismatch");
  for (std::size_t i = 0; i < vertex.size(); ++i) {
    if (!(vertex[i] > 0.0) || !std::isfinite(vertex[i])) {
      throw ValidationError("measure.vertex[" + std::to_string(i) + "]", "must be positive");
    }
  }
  for (std::size_t i = 0; i < edge.size(); ++i) {
    if (!(edge[i] > 0.0) || !std::isfinite(edge[i])) {
      throw ValidationError("measure.edge[" + std::to_string(i) + "]", "must be positive");
    }
  }
}

Potential Potential::zero(const OrientedGraph& g) {
  return {std::vector<double>(g.vertex_count(), 0.0), std::vector<double>(g.edge_count(), 0.0)};
}

void Potential::validate(const OrientedGraph& g) const {
  if (vertex.size() != g.vertex_count()) throw ValidationError("potential.vertex", "size mismatch");
  if (edge.size() != g.edge_count()) throw ValidationError("potential.edge", "size mismatch");
}

Cochain Cochain::zero(const OrientedGraph& g) {
  return {VectorC::Zero(idx(g.vertex_count())), VectorC::Zero(idx(g.edge_count()))};
}

Cochain& Cochain::operator+=(const Cochain& o) {
  if (vertex.size() != o.vertex.size() || edge.size() != o.edge.size()) throw ShapeError("cochain size mismatch");
  vertex += o.vertex;
  edge += o.edge;
  return *this;
}

Cochain& Cochain::operator-=(const Cochain& o) {
  if (vertex.size() != o.vertex.size() || edge.size() != o.edge.size()) throw ShapeError("cochain size mismatch");
  vertex -= o.vertex;
  edge -= o.edge;
  return *this;
}

double degree(const OrientedGraph& g, const Measure& m, std::size_t vertex) {
  const auto& star = g.outgoing(vertex);
  double s = 0.0;
  for (std::size_t oe : star) s += m.edge[OrientedGraph::unoriented(oe)];
  return s / m.vertex[vertex];
}

double max_degree(const OrientedGraph& g, const Measure& m) {
  double best = 0.0;
  for (std::size_t x = 0; x < g.vertex_count(); ++x) best = std::max(best, degree(g, m, x));
  return best;
}

Complex inner_product0(const VectorC& f, const VectorC& g, const Measure& m) {
  if (f.size() != g.size() || static_cast<std::size_t>(f.size()) != m.vertex.size()) {
    throw ShapeError("0-cochains do not match the measure");
  }
  Complex s{0.0, 0.0};
  for (Eigen::Index x = 0; x < f.size(); ++x) s += m.vertex[static_cast<std::size_t>(x)] * f(x) * std::conj(g(x));
  return s;
}

Complex inner_product1(const VectorC& f, const VectorC& g, const Measure& m) {
  if (f.size() != g.size() || static_cast<std::size_t>(f.size()) != m.edge.size()) {
    throw ShapeError("1-cochains do not match the measure");
  }
  // Both orientations of each edge contribute m(e) f(e) conj g(e); the 1/2 cancels the pair.
  Complex s{0.0, 0.0};
  for (Eigen::Index k = 0; k < f.size(); ++k) s += m.edge[static_cast<std::size_t>(k)] * f(k) * std::conj(g(k));
  return s;
}

Complex inner_product(const Cochain& f, const Cochain& g, const Measure& m) {
  return inner_product0(f.vertex, g.vertex, m) + inner_product1(f.edge, g.edge, m);
}

double norm(const Cochain& f, const Measure& m) { return std::sqrt(std::abs(inner_product(f, f, m))); }

VectorC apply_d(const OrientedGraph& g, const VectorC& f0) {
  check_sizes(g, f0, nullptr);
  VectorC out(idx(g.edge_count()));
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    auto [o, t] = g.ends(k);
    out(idx(k)) = f0(idx(t)) - f0(idx(o));
  }
  return out;
}

VectorC apply_d_star(const OrientedGraph& g, const Measure& m, const VectorC& f1) {
  check_edge_part(g, f1);
  VectorC out(idx(g.vertex_count()));
  for (std::size_t x = 0; x < g.vertex_count(); ++x) out(idx(x)) = -star_sum(g, m, f1, x);
  return out;
}

Cochain apply_gauss_bonnet(const OrientedGraph& g, const Measure& m, const Cochain& f) {
  check_sizes(g, f.vertex, &f.edge);
  return {apply_d_star(g, m, f.edge), apply_d(g, f.vertex)};
}

VectorC apply_laplacian0(const OrientedGraph& g, const Measure& m, const VectorC& f0) {
  check_sizes(g, f0, nullptr);
  VectorC out(idx(g.vertex_count()));
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    Complex s{0.0, 0.0};
    for (std::size_t oe : g.outgoing(x)) {
      s += (m.edge[OrientedGraph::unoriented(oe)] / m.vertex[x]) * (f0(idx(g.terminus(oe))) - f0(idx(x)));
    }
    out(idx(x)) = s;
  }
  return out;
}

VectorC apply_laplacian1(const OrientedGraph& g, const Measure& m, const VectorC& f1) {
  check_edge_part(g, f1);
  VectorC out(idx(g.edge_count()));
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    auto [o, t] = g.ends(k);
    out(idx(k)) = star_sum(g, m, f1, t) - star_sum(g, m, f1, o);
  }
  return out;
}

Cochain apply_potential(const Potential& r, const Cochain& f) {
  if (r.vertex.size() != static_cast<std::size_t>(f.vertex.size()) ||
      r.edge.size() != static_cast<std::size_t>(f.edge.size())) {
    throw ShapeError("potential does not match cochain");
  }
  Cochain out = f;
  for (Eigen::Index i = 0; i < f.vertex.size(); ++i) out.vertex(i) *= r.vertex[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i < f.edge.size(); ++i) out.edge(i) *= r.edge[static_cast<std::size_t>(i)];
  return out;
}

SparseC normalized_d_matrix(const OrientedGraph& g, const Measure& m) {
  m.validate(g);
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(2 * g.edge_count());
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    auto [o, t] = g.ends(k);
    double se = std::sqrt(m.edge[k]);
    if (o == t) continue;  // f(t) - f(o) vanishes on a loop
    trips.emplace_back(idx(k), idx(t), se / std::sqrt(m.vertex[t]));
    trips.emplace_back(idx(k), idx(o), -se / std::sqrt(m.vertex[o]));
  }
  SparseC d(idx(g.edge_count()), idx(g.vertex_count()));
  d.setFromTriplets(trips.begin(), trips.end());
  return d;
}

SparseC normalized_gauss_bonnet_matrix(const OrientedGraph& g, const Measure& m, const Potential& r) {
  r.validate(g);
  SparseC d = normalized_d_matrix(g, m);
  const Eigen::Index nv = idx(g.vertex_count());
  const Eigen::Index ne = idx(g.edge_count());
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(2 * d.nonZeros() + nv + ne));
  for (Eigen::Index c = 0; c < d.outerSize(); ++c) {
    for (SparseC::InnerIterator it(d, c); it; ++it) {
      trips.emplace_back(nv + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), nv + it.row(), std::conj(it.value()));
    }
  }
  for (Eigen::Index x = 0; x < nv; ++x) {
    if (r.vertex[static_cast<std::size_t>(x)] != 0.0) trips.emplace_back(x, x, r.vertex[static_cast<std::size_t>(x)]);
  }
  for (Eigen::Index k = 0; k < ne; ++k) {
    if (r.edge[static_cast<std::size_t>(k)] != 0.0) trips.emplace_back(nv + k, nv + k, r.edge[static_cast<std::size_t>(k)]);
  }
  SparseC out(nv + ne, nv + ne);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace cspec
