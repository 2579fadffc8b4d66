#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "cspec/errors.hpp"
#include "cspec/floquet.hpp"
#include "cspec/perturbation.hpp"
#include "generators.hpp"

using namespace cspec;
using cspec::testing::Rng;

namespace {

Crystal catalog(const std::string& name) { return Crystal::build(standard_lattice(name)); }

Crystal shifted_z(double a) {
  auto d = standard_lattice("z1");
  d.vertices[0].potential = a;
  d.edges[0].potential = a;
  return Crystal::build(d);
}

TorusPoint random_xi(Rng& rng, int d) {
  std::vector<double> xi;
  for (int a = 0; a < d; ++a) xi.push_back(rng.uniform(0.0, 1.0));
  return TorusPoint(xi);
}

double cochain_norm2(const Crystal& c, const CrystalCochain& f) {
  double s = 0.0;
  for (const auto& [k, v] : f.vertex) s += c.descriptor().vertices[k.base].measure * std::norm(v);
  for (const auto& [k, v] : f.edge) s += c.descriptor().edges[k.base].measure * std::norm(v);
  return s;
}

double cochain_difference(const CrystalCochain& a, const CrystalCochain& b) {
  double e = 0.0;
  for (const auto& [k, v] : a.vertex) e = std::max(e, std::abs(v - b.at_vertex(k)));
  for (const auto& [k, v] : b.vertex) e = std::max(e, std::abs(v - a.at_vertex(k)));
  auto edge_at = [](const CrystalCochain& f, const CellKey& k) {
    const auto it = f.edge.find(k);
    return it == f.edge.end() ? Complex{} : it->second;
  };
  for (const auto& [k, v] : a.edge) e = std::max(e, std::abs(v - edge_at(b, k)));
  for (const auto& [k, v] : b.edge) e = std::max(e, std::abs(v - edge_at(a, k)));
  return e;
}

}  // namespace

TEST(TorusGrid, OrderAndReduction) {
  const auto g = torus_grid(2, 3);
  ASSERT_EQ(g.size(), 9u);
  EXPECT_DOUBLE_EQ(g[1].xi[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(g[3].xi[0], 1.0 / 3.0);
  EXPECT_NEAR(TorusPoint({1.25, -0.25}).xi[0], 0.25, 1e-15);
  EXPECT_NEAR(TorusPoint({1.25, -0.25}).xi[1], 0.75, 1e-15);
}

TEST(H0, ZClosedForm) {
  const Crystal z = catalog("z1");
  for (double xi : {0.0, 0.1, 0.37, 0.5, 0.9}) {
    const MatrixC h = assemble_h0(z, TorusPoint({xi}));
    const Complex e = std::polar(1.0, 2.0 * M_PI * xi);
    EXPECT_NEAR(std::abs(h(0, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h(1, 1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h(0, 1) - (-1.0 + std::conj(e))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h(1, 0) - (-1.0 + e)), 0.0, 1e-15);
  }
  EXPECT_LE(assemble_h0(z, TorusPoint({0.0})).cwiseAbs().maxCoeff(), 1e-15);
  const auto half = fiber_eigenvalues(z, TorusPoint({0.5}));
  EXPECT_NEAR(half[0], -2.0, 1e-14);
  EXPECT_NEAR(half[1], 2.0, 1e-14);
}

TEST(H0, HermitianOnCatalog) {
  Rng rng(1);
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    for (int t = 0; t < 200; ++t) {
      const MatrixC h = assemble_h0(c, random_xi(rng, c.dimension()));
      EXPECT_LE((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(H1Edge, ZAndHexagonal) {
  const Crystal z = catalog("z1");
  for (double xi : {0.0, 0.2, 0.5, 0.77}) {
    const MatrixC h = assemble_h1_edge(z, TorusPoint({xi}));
    EXPECT_NEAR(std::abs(h(0, 0) - (2.0 - 2.0 * std::cos(2.0 * M_PI * xi))), 0.0, 1e-14);
  }
  Rng rng(2);
  const Crystal hex = catalog("hexagonal");
  for (int t = 0; t < 50; ++t) {
    const TorusPoint xi = random_xi(rng, 2);
    const MatrixC h1 = assemble_h1_edge(hex, xi);
    const MatrixC h0 = assemble_h0(hex, xi);
    const MatrixC sq = h0 * h0;
    EXPECT_NEAR(h1.trace().real(), 6.0, 1e-12);
    EXPECT_NEAR(sq.topLeftCorner(2, 2).trace().real(), 6.0, 1e-12);
  }
}

TEST(H1Edge, IsTheEdgeBlockOfTheSquare) {
  Rng rng(3);
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    auto d = c.descriptor();
    for (auto& v : d.vertices) v.potential = 0.0;
    for (auto& e : d.edges) e.potential = 0.0;
    const Crystal bare = Crystal::build(d);
    const auto n = static_cast<Eigen::Index>(c.vertex_count());
    const auto l = static_cast<Eigen::Index>(c.edge_count());
    for (int t = 0; t < 20; ++t) {
      const TorusPoint xi = random_xi(rng, c.dimension());
      const MatrixC h0 = assemble_h0(bare, xi);
      const MatrixC sq = h0 * h0;
      EXPECT_LE((assemble_h1_edge(bare, xi) - sq.bottomRightCorner(l, l)).cwiseAbs().maxCoeff(), 1e-13) << name;
      EXPECT_LE(sq.topRightCorner(n, l).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(BlochTransform, Deltas) {
  const Crystal z = catalog("hexagonal");
  CrystalCochain f;
  f.vertex[{0, LatticePoint{0, 0}}] = 1.0;
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const TorusPoint xi = random_xi(rng, 2);
    const VectorC u = bloch_transform(z, f, xi);
    EXPECT_NEAR(std::abs(u(0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(u.tail(4).norm(), 0.0, 1e-15);
  }
  CrystalCochain g;
  const LatticePoint mu0{2, -1};
  g.vertex[{0, mu0}] = 1.0;
  for (int t = 0; t < 10; ++t) {
    const TorusPoint xi = random_xi(rng, 2);
    const VectorC u = bloch_transform(z, g, xi);
    EXPECT_NEAR(std::abs(u(0) - std::polar(1.0, -2.0 * M_PI * mu0.dot(xi.xi))), 0.0, 1e-14);
  }
}

TEST(BlochTransform, Parseval) {
  Rng rng(5);
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    const std::size_t n = c.dimension() == 1 ? 16 : 8;
    for (int t = 0; t < 10; ++t) {
      const auto f = cspec::testing::random_crystal_cochain(rng, c, 3);
      const auto samples = bloch_samples(c, f, n);
      double quad = 0.0;
      for (const auto& u : samples) quad += u.squaredNorm();
      quad /= static_cast<double>(samples.size());
      EXPECT_NEAR(quad, cochain_norm2(c, f), 1e-10 * std::max(1.0, quad)) << name;
    }
  }
}

TEST(InverseBloch, RoundTrip) {
  Rng rng(6);
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    CrystalCochain delta;
    delta.edge[{0, LatticePoint(c.dimension())}] = Complex(0.0, 2.0);
    EXPECT_LE(cochain_difference(inverse_bloch(c, bloch_samples(c, delta, 4), 4), delta), 1e-14);
    const std::size_t n = c.dimension() == 1 ? 16 : 8;
    const auto f = cspec::testing::random_crystal_cochain(rng, c, 3);
    EXPECT_LE(cochain_difference(inverse_bloch(c, bloch_samples(c, f, n), n), f), 1e-10) << name;
  }
}

TEST(InverseBloch, CoarseGridAliases) {
  Rng rng(7);
  const Crystal z = catalog("z1");
  const auto f = cspec::testing::random_crystal_cochain(rng, z, 3, 1.0);
  EXPECT_GT(cochain_difference(inverse_bloch(z, bloch_samples(z, f, 4), 4), f), 1e-3);
}

TEST(BlochTransform, IntertwinesH0) {
  Rng rng(8);
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    const auto f = cspec::testing::random_crystal_cochain(rng, c, 2);
    const auto hf = apply_periodic_H0(c, f, 2 + c.max_eta_norm());
    for (int t = 0; t < 20; ++t) {
      const TorusPoint xi = random_xi(rng, c.dimension());
      const VectorC lhs = bloch_transform(c, hf, xi);
      const VectorC rhs = assemble_h0(c, xi) * bloch_transform(c, f, xi);
      EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10) << name;
    }
  }
}

TEST(Bands, ZClosedForm) {
  const auto b = compute_bands(catalog("z1"), 256);
  ASSERT_EQ(b.points.size(), 256u);
  for (std::size_t p = 0; p < b.points.size(); ++p) {
    const double s = 2.0 * std::abs(std::sin(M_PI * b.points[p].xi[0]));
    EXPECT_NEAR(b.eigenvalues[p][0], -s, 1e-10);
    EXPECT_NEAR(b.eigenvalues[p][1], s, 1e-10);
  }
  const auto u = b.band_union();
  ASSERT_EQ(u.size(), 1u);
  EXPECT_NEAR(u[0].first, -2.0, 1e-12);
  EXPECT_NEAR(u[0].second, 2.0, 1e-12);
}

TEST(Bands, ShiftedZ) {
  const double a = 0.75;
  const auto b = compute_bands(shifted_z(a), 64);
  for (std::size_t p = 0; p < b.points.size(); ++p) {
    const double s = 2.0 * std::abs(std::sin(M_PI * b.points[p].xi[0]));
    EXPECT_NEAR(b.eigenvalues[p][0], a - s, 1e-10);
    EXPECT_NEAR(b.eigenvalues[p][1], a + s, 1e-10);
  }
}

TEST(Bands, HexagonalDispersion) {
  const Crystal hex = catalog("hexagonal");
  for (const auto& xi : torus_grid(2, 64)) {
    const MatrixC h = assemble_h0(hex, xi);
    const MatrixC vb = (h * h).topLeftCorner(2, 2);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixC>(vb).eigenvalues();
    const double r = std::abs(1.0 + std::polar(1.0, 2.0 * M_PI * xi.xi[0]) + std::polar(1.0, 2.0 * M_PI * xi.xi[1]));
    EXPECT_NEAR(ev(0), 3.0 - r, 1e-10);
    EXPECT_NEAR(ev(1), 3.0 + r, 1e-10);
  }
}

TEST(Bands, SquaredBandsAreHodgeBlocks) {
  for (const auto& name : catalog_names()) {
    auto d = standard_lattice(name);
    for (auto& v : d.vertices) v.potential = 0.0;
    for (auto& e : d.edges) e.potential = 0.0;
    const Crystal c = Crystal::build(d);
    const auto bands = compute_bands(c, c.dimension() == 1 ? 32 : 8);
    const auto edge_bands = compute_bands(c, c.dimension() == 1 ? 32 : 8, FiberKind::edge_laplacian);
    const auto n = static_cast<Eigen::Index>(c.vertex_count());
    for (std::size_t p = 0; p < bands.points.size(); ++p) {
      std::vector<double> squares;
      for (double x : bands.eigenvalues[p]) squares.push_back(x * x);
      std::sort(squares.begin(), squares.end());
      const MatrixC h = assemble_h0(c, bands.points[p]);
      const Eigen::VectorXd v = Eigen::SelfAdjointEigenSolver<MatrixC>((h * h).topLeftCorner(n, n)).eigenvalues();
      std::vector<double> blocks(v.data(), v.data() + v.size());
      blocks.insert(blocks.end(), edge_bands.eigenvalues[p].begin(), edge_bands.eigenvalues[p].end());
      std::sort(blocks.begin(), blocks.end());
      ASSERT_EQ(blocks.size(), squares.size());
      for (std::size_t i = 0; i < blocks.size(); ++i) EXPECT_NEAR(blocks[i], squares[i], 1e-10) << name;
    }
  }
}

TEST(Bands, ContinuityScalesWithGrid) {
  const Crystal c = catalog("hexagonal");
  auto max_jump = [&](std::size_t n) {
    const auto b = compute_bands(c, n);
    double j = 0.0;
    for (std::size_t p = 0; p < b.points.size(); ++p) {
      const std::size_t next = (p % n + 1 < n) ? p + 1 : p;
      for (std::size_t k = 0; k < b.band_count; ++k) j = std::max(j, std::abs(b.eigenvalues[next][k] - b.eigenvalues[p][k]));
    }
    return j * static_cast<double>(n);
  };
  const double c16 = max_jump(16);
  const double c32 = max_jump(32);
  EXPECT_LT(c32, 2.0 * c16);
}

TEST(Thresholds, ZAndShiftedZ) {
  const Crystal z = catalog("z1");
  auto b = compute_bands(z, 64);
  const auto t = estimate_thresholds(z, b);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_NEAR(t[0], -2.0, 1e-9);
  EXPECT_NEAR(t[1], 0.0, 1e-9);
  EXPECT_NEAR(t[2], 2.0, 1e-9);
  EXPECT_EQ(b.thresholds, t);
  const double a = -0.4;
  const Crystal s = shifted_z(a);
  auto bs = compute_bands(s, 64);
  const auto ts = estimate_thresholds(s, bs);
  ASSERT_EQ(ts.size(), 3u);
  EXPECT_NEAR(ts[0], a - 2.0, 1e-9);
  EXPECT_NEAR(ts[1], a, 1e-9);
  EXPECT_NEAR(ts[2], a + 2.0, 1e-9);
}

TEST(Thresholds, FlatBandIsFlagged) {
  // An isolated extra vertex contributes the constant band R(p).
  CrystalDescriptor d = standard_lattice("z1");
  d.vertices.push_back({"p", 1.0, 0.5});
  const Crystal c = Crystal::build(d);
  auto b = compute_bands(c, 32);
  const auto t = estimate_thresholds(c, b);
  EXPECT_TRUE(std::any_of(t.begin(), t.end(), [](double x) { return std::abs(x - 0.5) < 1e-9; }));
}

TEST(BandOutput, CsvAndJson) {
  const auto b = compute_bands(catalog("hexagonal"), 4);
  const std::string csv = bands_to_csv(b);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "xi_1,xi_2,band_1,band_2,band_3,band_4,band_5");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 17);
  const auto j = bands_to_json(b);
  EXPECT_EQ(j["grid"], 4);
  EXPECT_EQ(j["band_count"], 5);
}

TEST(Bands, RejectsTinyGrid) { EXPECT_THROW(compute_bands(catalog("z1"), 1), ValidationError); }
