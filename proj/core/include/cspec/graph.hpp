#pragma once

// Finite weighted graphs, cochains and the discrete operators d, d*, D, Delta_0, Delta_1.
//
// Oriented edges are numbered 2k (the stored orientation of unoriented edge k)
// and 2k+1 (its reversal). 1-cochains store one value per unoriented edge, the
// value on the stored orientation; the reversal reads back as its negative.

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cspec {

using Complex = std::complex<double>;
using VectorC = Eigen::VectorXcd;
using MatrixC = Eigen::MatrixXcd;
using SparseC = Eigen::SparseMatrix<Complex>;

class OrientedGraph {
 public:
  OrientedGraph() = default;
  /// `edges` lists unoriented edges by their stored orientation (origin, terminus).
  /// Loops and multiple edges are allowed.
  OrientedGraph(std::size_t vertex_count, std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return ends_.size(); }
  std::size_t oriented_edge_count() const noexcept { return 2 * ends_.size(); }

  std::size_t origin(std::size_t oriented) const;
  std::size_t terminus(std::size_t oriented) const;
  static std::size_t reversal(std::size_t oriented) noexcept { return oriented ^ 1U; }
  static std::size_t unoriented(std::size_t oriented) noexcept { return oriented >> 1U; }
  /// +1 on a stored orientation, -1 on a reversal.
  static double orientation_sign(std::size_t oriented) noexcept { return (oriented & 1U) ? -1.0 : 1.0; }

  /// A_x: oriented edges with origin x. A loop contributes both orientations.
  const std::vector<std::size_t>& outgoing(std::size_t vertex) const;

  bool is_loop(std::size_t edge) const { return ends_.at(edge).first == ends_.at(edge).second; }
  const std::pair<std::size_t, std::size_t>& ends(std::size_t edge) const { return ends_.at(edge); }

 private:
  std::size_t vertex_count_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
  std::vector<std::vector<std::size_t>> outgoing_;
};

/// Positive weights on vertices and on unoriented edges (m(e) = m(e-bar) by storage).
struct Measure {
  std::vector<double> vertex;
  std::vector<double> edge;

  static Measure uniform(const OrientedGraph& g, double value = 1.0);
  /// Throws ValidationError on a size mismatch or a non-positive weight.
  void validate(const OrientedGraph& g) const;
};

/// Real multiplier on vertices and unoriented edges.
struct Potential {
  std::vector<double> vertex;
  std::vector<double> edge;

  static Potential zero(const OrientedGraph& g);
  void validate(const OrientedGraph& g) const;
};

/// f = f0 (+) f1. `edge[k]` is the value on oriented edge 2k.
struct Cochain {
  VectorC vertex;
  VectorC edge;

  static Cochain zero(const OrientedGraph& g);
  /// Value on an arbitrary oriented edge, f(e-bar) = -f(e).
  Complex on_oriented(std::size_t oriented) const {
    return OrientedGraph::orientation_sign(oriented) * edge(static_cast<Eigen::Index>(oriented >> 1U));
  }
  Cochain& operator+=(const Cochain& o);
  Cochain& operator-=(const Cochain& o);
  friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
  friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
};

double degree(const OrientedGraph& g, const Measure& m, std::size_t vertex);
double max_degree(const OrientedGraph& g, const Measure& m);

/// <f, g> = sum_x m(x) f(x) conj g(x) + 1/2 sum_{e in A(X)} m(e) f(e) conj g(e).
Complex inner_product(const Cochain& f, const Cochain& g, const Measure& m);
Complex inner_product0(const VectorC& f, const VectorC& g, const Measure& m);
Complex inner_product1(const VectorC& f, const VectorC& g, const Measure& m);
double norm(const Cochain& f, const Measure& m);

/// (df)(e) = f(t(e)) - f(o(e))
VectorC apply_d(const OrientedGraph& g, const VectorC& f0);
/// (d* f)(x) = -sum_{e in A_x} m(e)/m(x) f(e)
VectorC apply_d_star(const OrientedGraph& g, const Measure& m, const VectorC& f1);
/// D = d + d*, block off-diagonal on C^0 (+) C^1.
Cochain apply_gauss_bonnet(const OrientedGraph& g, const Measure& m, const Cochain& f);
/// (Delta_0 f)(x) = sum_{e in A_x} m(e)/m(x) (f(t(e)) - f(x))
VectorC apply_laplacian0(const OrientedGraph& g, const Measure& m, const VectorC& f0);
/// (Delta_1 f)(e) = sum_{e' in A_t(e)} m(e')/m(t(e)) f(e') - sum_{e' in A_o(e)} m(e')/m(o(e)) f(e')
VectorC apply_laplacian1(const OrientedGraph& g, const Measure& m, const VectorC& f1);
Cochain apply_potential(const Potential& r, const Cochain& f);

/// Matrix of d in the m^{1/2}-normalized bases (rows: edges, columns: vertices).
/// Its conjugate transpose is the matrix of d* in the same bases.
SparseC normalized_d_matrix(const OrientedGraph& g, const Measure& m);

/// Matrix of D + R on C^{V+E} in the m^{1/2}-normalized basis, vertices first.
SparseC normalized_gauss_bonnet_matrix(const OrientedGraph& g, const Measure& m, const Potential& r);

}  // namespace cspec
