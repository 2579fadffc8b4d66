#include "cspec/magnetic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cspec/errors.hpp"

namespace cspec {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta) {
  m.validate(g);
  theta.validate(g);
}

// Value of a magnetic 1-cochain on a base oriented edge, from its positive-orientation storage.
Complex magnetic_value(const FluxAssignment& theta, const VectorC& f1, std::size_t oriented) {
  const std::size_t k = OrientedGraph::unoriented(oriented);
  if (oriented & 1U) return -std::conj(theta.theta[k]) * f1(idx(k));
  return f1(idx(k));
}

}  // namespace

FluxAssignment FluxAssignment::trivial(std::size_t edge_count) {
  return {std::vector<Complex>(edge_count, Complex{1.0, 0.0})};
}

FluxAssignment FluxAssignment::from_phases(std::span<const double> phases) {
  FluxAssignment f;
  for (double p : phases) f.theta.push_back(std::polar(1.0, 2.0 * std::numbers::pi * p));
  return f;
}

void FluxAssignment::validate(const OrientedGraph& g) const {
  if (theta.size() != g.edge_count()) throw ValidationError("flux", "one phase per edge is required");
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (std::abs(std::abs(theta[k]) - 1.0) > 1e-12) {
      throw ValidationError("flux[" + std::to_string(k) + "]", "must have unit modulus");
    }
  }
}

FluxAssignment bloch_flux(const Crystal& c, std::span<const double> xi) {
  FluxAssignment f;
  f.theta.reserve(c.edge_count());
  for (std::size_t k = 0; k < c.edge_count(); ++k) {
    f.theta.push_back(std::polar(1.0, 2.0 * std::numbers::pi * c.eta(k).dot(xi)));
  }
  return f;
}

MatrixC magnetic_d_matrix(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta) {
  check(g, m, theta);
  MatrixC d = MatrixC::Zero(idx(g.edge_count()), idx(g.vertex_count()));
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    auto [o, t] = g.ends(k);
    const double se = std::sqrt(m.edge[k]);
    d(idx(k), idx(t)) += theta.theta[k] * se / std::sqrt(m.vertex[t]);
    d(idx(k), idx(o)) -= se / std::sqrt(m.vertex[o]);
  }
  return d;
}

MatrixC magnetic_d_star_matrix(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta) {
  check(g, m, theta);
  const std::size_t l = g.edge_count();
  MatrixC ds = MatrixC::Zero(idx(g.vertex_count()), idx(l));
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    for (std::size_t oe : g.outgoing(x)) {
      const std::size_t k = OrientedGraph::unoriented(oe);
      // Column k of the star sum: coefficient of f(e_k) in f(oe), then normalize.
      VectorC unit = VectorC::Zero(idx(l));
      unit(idx(k)) = 1.0;
      const Complex coeff = magnetic_value(theta, unit, oe);
      ds(idx(x), idx(k)) -= (m.edge[k] / m.vertex[x]) * coeff * std::sqrt(m.vertex[x]) / std::sqrt(m.edge[k]);
    }
  }
  return ds;
}

MatrixC magnetic_gauss_bonnet_matrix(const OrientedGraph& g, const Measure& m, const Potential& r,
                                     const FluxAssignment& theta) {
  r.validate(g);
  const Eigen::Index n = idx(g.vertex_count());
  const Eigen::Index l = idx(g.edge_count());
  MatrixC out = MatrixC::Zero(n + l, n + l);
  out.block(0, n, n, l) = magnetic_d_star_matrix(g, m, theta);
  out.block(n, 0, l, n) = magnetic_d_matrix(g, m, theta);
  for (Eigen::Index j = 0; j < n; ++j) out(j, j) = r.vertex[static_cast<std::size_t>(j)];
  for (Eigen::Index k = 0; k < l; ++k) out(n + k, n + k) = r.edge[static_cast<std::size_t>(k)];
  return out;
}

MatrixC magnetic_laplacian0_matrix(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta) {
  check(g, m, theta);
  const std::size_t n = g.vertex_count();
  MatrixC lap = MatrixC::Zero(idx(n), idx(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t oe : g.outgoing(x)) {
      const std::size_t k = OrientedGraph::unoriented(oe);
      const std::size_t y = g.terminus(oe);
      const double w = m.edge[k] / m.vertex[x];
      lap(idx(x), idx(y)) += w * theta.on_oriented(oe) * std::sqrt(m.vertex[x] / m.vertex[y]);
      lap(idx(x), idx(x)) -= w;
    }
  }
  return lap;
}

MatrixC magnetic_laplacian1_matrix(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta) {
  check(g, m, theta);
  const std::size_t l = g.edge_count();
  MatrixC lap = MatrixC::Zero(idx(l), idx(l));
  VectorC unit = VectorC::Zero(idx(l));
  for (std::size_t k = 0; k < l; ++k) {
    auto [o, t] = g.ends(k);
    // Row k: theta(e_k) sum_{A_t} m(e')/m(t) f(e') - sum_{A_o} m(e')/m(o) f(e').
    auto add_star = [&](std::size_t x, Complex factor) {
      for (std::size_t oe : g.outgoing(x)) {
        const std::size_t q = OrientedGraph::unoriented(oe);
        unit.setZero();
        unit(idx(q)) = 1.0;
        const Complex coeff = magnetic_value(theta, unit, oe);
        lap(idx(k), idx(q)) +=
            factor * (m.edge[q] / m.vertex[x]) * coeff * std::sqrt(m.edge[k]) / std::sqrt(m.edge[q]);
      }
    };
    add_star(t, theta.theta[k]);
    add_star(o, Complex{-1.0, 0.0});
  }
  return lap;
}

MagneticMatrixSet magnetic_matrices(const OrientedGraph& g, const Measure& m, const Potential& r,
                                    const FluxAssignment& theta) {
  return {magnetic_d_matrix(g, m, theta), magnetic_d_star_matrix(g, m, theta),
          magnetic_gauss_bonnet_matrix(g, m, r, theta), magnetic_laplacian0_matrix(g, m, theta),
          magnetic_laplacian1_matrix(g, m, theta)};
}

VectorC apply_magnetic_d(const OrientedGraph& g, const FluxAssignment& theta, const VectorC& f0) {
  theta.validate(g);
  if (static_cast<std::size_t>(f0.size()) != g.vertex_count()) throw ShapeError("0-cochain size mismatch");
  VectorC out(idx(g.edge_count()));
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    auto [o, t] = g.ends(k);
    out(idx(k)) = theta.theta[k] * f0(idx(t)) - f0(idx(o));
  }
  return out;
}

VectorC apply_magnetic_d_star(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta,
                              const VectorC& f1) {
  theta.validate(g);
  if (static_cast<std::size_t>(f1.size()) != g.edge_count()) throw ShapeError("1-cochain size mismatch");
  VectorC out = VectorC::Zero(idx(g.vertex_count()));
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    for (std::size_t oe : g.outgoing(x)) {
      out(idx(x)) -= (m.edge[OrientedGraph::unoriented(oe)] / m.vertex[x]) * magnetic_value(theta, f1, oe);
    }
  }
  return out;
}

}  // namespace cspec
