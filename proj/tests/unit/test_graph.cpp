#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cspec/errors.hpp"
#include "cspec/graph.hpp"
#include "generators.hpp"

using namespace cspec;
using cspec::testing::Rng;

namespace {

// Path x0 - x1 - ... - x_{n-1}, edges stored forward.
OrientedGraph path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return OrientedGraph(n, e);
}

OrientedGraph cycle(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return OrientedGraph(n, e);
}

VectorC delta(std::size_t n, std::size_t i) {
  VectorC v = VectorC::Zero(static_cast<Eigen::Index>(n));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

}  // namespace

TEST(Graph, ReversalIsAnInvolution) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto g = cspec::testing::random_graph(rng, 12);
    for (std::size_t e = 0; e < g.oriented_edge_count(); ++e) {
      const auto r = OrientedGraph::reversal(e);
      EXPECT_EQ(OrientedGraph::reversal(r), e);
      EXPECT_EQ(g.origin(r), g.terminus(e));
      EXPECT_EQ(g.terminus(r), g.origin(e));
    }
  }
}

TEST(Graph, StarsListOutgoingEdgesAndLoopsTwice) {
  const OrientedGraph g(2, {{0, 0}, {0, 1}});
  const auto& a0 = g.outgoing(0);
  EXPECT_EQ(a0.size(), 3u);
  EXPECT_EQ(std::count(a0.begin(), a0.end(), 0u), 1);
  EXPECT_EQ(std::count(a0.begin(), a0.end(), 1u), 1);
  for (auto e : a0) EXPECT_EQ(g.origin(e), 0u);
  EXPECT_EQ(g.outgoing(1).size(), 1u);
}

TEST(Graph, RejectsOutOfRangeEndpoints) {
  EXPECT_THROW(OrientedGraph(2, {{0, 2}}), ValidationError);
  EXPECT_THROW(path(2).outgoing(5), LookupError);
}

TEST(Degree, Examples) {
  const auto p = path(3);
  EXPECT_DOUBLE_EQ(degree(p, Measure::uniform(p), 1), 2.0);
  const OrientedGraph iso(1, {});
  EXPECT_DOUBLE_EQ(degree(iso, Measure::uniform(iso), 0), 0.0);
  const OrientedGraph loop(1, {{0, 0}});
  EXPECT_DOUBLE_EQ(degree(loop, Measure::uniform(loop), 0), 2.0);
}

TEST(InnerProduct, Examples) {
  const OrientedGraph g(2, {{0, 1}});
  Measure m = Measure::uniform(g);
  m.vertex[0] = 2.0;
  Cochain f = Cochain::zero(g);
  f.vertex(0) = 1.0;
  EXPECT_NEAR(std::abs(inner_product(f, f, m) - 2.0), 0.0, 1e-15);
  Cochain e = Cochain::zero(g);
  e.edge(0) = 1.0;
  EXPECT_NEAR(std::abs(inner_product(e, e, m) - 1.0), 0.0, 1e-15);
  Cochain h = Cochain::zero(g);
  h.vertex(1) = 3.0;
  EXPECT_EQ(inner_product(f, h, m), Complex{});
}

TEST(ApplyD, Examples) {
  const auto p = path(4);
  EXPECT_TRUE(apply_d(p, VectorC::Constant(4, Complex(2, 1))).isZero());
  // edge 1 leaves x1 forward
  EXPECT_EQ(apply_d(p, delta(4, 1))(1), Complex(-1.0));
  const OrientedGraph loop(1, {{0, 0}});
  EXPECT_EQ(apply_d(loop, delta(1, 0))(0), Complex{});
}

TEST(ApplyDStar, PathStencil) {
  const auto p = path(5);
  const auto m = Measure::uniform(p);
  const VectorC v = apply_d_star(p, m, apply_d(p, delta(5, 2)));
  EXPECT_NEAR(std::abs(v(2) - 2.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v(1) + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v(3) + 1.0), 0.0, 1e-15);
  EXPECT_TRUE(apply_d_star(p, m, VectorC::Zero(4)).isZero());
}

TEST(ApplyDStar, Adjointness) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto g = cspec::testing::random_graph(rng, 20);
    const auto m = cspec::testing::random_measure(rng, g);
    const VectorC f = rng.vector(g.vertex_count());
    const VectorC h = rng.vector(g.edge_count());
    const Complex lhs = inner_product1(apply_d(g, f), h, m);
    const Complex rhs = inner_product0(f, apply_d_star(g, m, h), m);
    const double scale = std::sqrt(std::abs(inner_product0(f, f, m)) * std::abs(inner_product1(h, h, m)));
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(scale, 1.0));
  }
}

TEST(GaussBonnet, BlockStructure) {
  Rng rng(3);
  const auto g = cspec::testing::random_graph(rng, 10);
  const auto m = cspec::testing::random_measure(rng, g);
  Cochain f0 = Cochain::zero(g);
  f0.vertex = rng.vector(g.vertex_count());
  EXPECT_TRUE(apply_gauss_bonnet(g, m, f0).vertex.isZero());
  Cochain f1 = Cochain::zero(g);
  f1.edge = rng.vector(g.edge_count());
  EXPECT_TRUE(apply_gauss_bonnet(g, m, f1).edge.isZero());
}

TEST(GaussBonnet, SquareIsHodgeLaplacian) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto g = cspec::testing::random_graph(rng, 20);
    const auto m = cspec::testing::random_measure(rng, g);
    const Cochain f = cspec::testing::random_cochain(rng, g);
    const Cochain dd = apply_gauss_bonnet(g, m, apply_gauss_bonnet(g, m, f));
    const VectorC l0 = -apply_laplacian0(g, m, f.vertex);
    const VectorC l1 = -apply_laplacian1(g, m, f.edge);
    const double err = std::max((dd.vertex - l0).cwiseAbs().maxCoeff(), g.edge_count() ? (dd.edge - l1).cwiseAbs().maxCoeff() : 0.0);
    EXPECT_LE(err, 1e-12 * std::max(1.0, norm(f, m)));
  }
}

TEST(GaussBonnet, IsSymmetric) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto g = cspec::testing::random_graph(rng, 15);
    const auto m = cspec::testing::random_measure(rng, g);
    const Cochain f = cspec::testing::random_cochain(rng, g);
    const Cochain h = cspec::testing::random_cochain(rng, g);
    const Complex a = inner_product(apply_gauss_bonnet(g, m, f), h, m);
    const Complex b = inner_product(f, apply_gauss_bonnet(g, m, h), m);
    EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, norm(f, m) * norm(h, m)));
  }
}

TEST(GaussBonnet, NormBound) {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    const auto g = cspec::testing::random_graph(rng, 15);
    const auto m = cspec::testing::random_measure(rng, g);
    const Cochain f = cspec::testing::random_cochain(rng, g);
    double sup = 0.0;
    for (std::size_t x = 0; x < g.vertex_count(); ++x) sup = std::max(sup, degree(g, m, x));
    EXPECT_LE(norm(apply_gauss_bonnet(g, m, f), m), 2.0 * std::sqrt(sup) * norm(f, m) + 1e-12);
  }
}

TEST(Laplacian1, PathMidpointStencil) {
  const auto p = path(6);
  const auto m = Measure::uniform(p);
  Rng rng(7);
  const VectorC f = rng.vector(5);
  const VectorC out = -apply_laplacian1(p, m, f);
  for (Eigen::Index k = 1; k < 4; ++k) {
    EXPECT_NEAR(std::abs(out(k) - (2.0 * f(k) - f(k - 1) - f(k + 1))), 0.0, 1e-14);
  }
}

TEST(Laplacian1, OrientedConstantOnCycleIsHarmonic) {
  const auto c = cycle(7);
  EXPECT_LE(apply_laplacian1(c, Measure::uniform(c), VectorC::Constant(7, 1.0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Laplacian1, EqualsMinusDDStar) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const auto g = cspec::testing::random_graph(rng, 20);
    const auto m = cspec::testing::random_measure(rng, g);
    const VectorC f = rng.vector(g.edge_count());
    if (f.size() == 0) continue;
    const VectorC a = apply_laplacian1(g, m, f);
    const VectorC b = -apply_d(g, apply_d_star(g, m, f));
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, f.cwiseAbs().maxCoeff()));
  }
}

TEST(NormalizedMatrices, MatchOperatorsUnderScaling) {
  Rng rng(9);
  for (int t = 0; t < 30; ++t) {
    const auto g = cspec::testing::random_graph(rng, 12);
    const auto m = cspec::testing::random_measure(rng, g);
    const auto r = Potential::zero(g);
    const Cochain f = cspec::testing::random_cochain(rng, g);
    const Cochain out = apply_gauss_bonnet(g, m, f);
    const std::size_t n = g.vertex_count();
    VectorC v(static_cast<Eigen::Index>(n + g.edge_count()));
    VectorC w(v.size());
    for (std::size_t i = 0; i < n; ++i) {
      v(static_cast<Eigen::Index>(i)) = std::sqrt(m.vertex[i]) * f.vertex(static_cast<Eigen::Index>(i));
      w(static_cast<Eigen::Index>(i)) = std::sqrt(m.vertex[i]) * out.vertex(static_cast<Eigen::Index>(i));
    }
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
      v(static_cast<Eigen::Index>(n + k)) = std::sqrt(m.edge[k]) * f.edge(static_cast<Eigen::Index>(k));
      w(static_cast<Eigen::Index>(n + k)) = std::sqrt(m.edge[k]) * out.edge(static_cast<Eigen::Index>(k));
    }
    const MatrixC a = MatrixC(normalized_gauss_bonnet_matrix(g, m, r));
    EXPECT_LE((a * v - w).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((a - a.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Measure, Validation) {
  const auto p = path(3);
  Measure m = Measure::uniform(p);
  EXPECT_NO_THROW(m.validate(p));
  m.edge[1] = 0.0;
  EXPECT_THROW(m.validate(p), ValidationError);
  m.edge.pop_back();
  EXPECT_THROW(m.validate(p), ValidationError);
}
