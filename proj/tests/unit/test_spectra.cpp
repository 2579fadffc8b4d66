#include <gtest/gtest.h>

#include <cmath>

#include "cspec/errors.hpp"
#include "cspec/perturbation.hpp"
#include "cspec/spectra.hpp"
#include "generators.hpp"

using namespace cspec;

namespace {

Crystal catalog(const std::string& name) { return Crystal::build(standard_lattice(name)); }

HermitianMatrixHandle periodic(const Crystal& c, std::int64_t r, FiberKind kind = FiberKind::gauss_bonnet) {
  return assemble_truncated(c, PeriodicMeasureField(c), PeriodicPotentialField(c), r, kind);
}

PerturbationProfile vertex_bump(double amplitude, int dimension = 1) {
  PerturbationProfile p;
  p.short_range.push_back({{ElementKind::vertex, 0}, LatticePoint(dimension), amplitude});
  return p;
}

double operator_norm(const MatrixC& m) { return Eigen::JacobiSVD<MatrixC>(m).singularValues()(0); }

}  // namespace

TEST(Assemble, ZRadiusTwoShapeAndNorm) {
  const Crystal c = catalog("z1");
  const auto h = periodic(c, 2);
  EXPECT_EQ(h.dimension(), 9u);
  EXPECT_EQ(h.hermiticity_defect(), 0.0);
  const MatrixC a = h.dense();
  EXPECT_LE((a - a.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(operator_norm(a), 2.0 + 1e-12);
}

TEST(Assemble, HexagonalVertexBlock) {
  const Crystal c = catalog("hexagonal");
  const Truncation t = truncate(c, 1);
  EXPECT_EQ(t.vertices.size(), 18u);
  EXPECT_EQ(periodic(c, 1).dimension(), t.vertices.size() + t.edges.size());
}

TEST(Assemble, PeriodicProfileMatchesPlainTruncation) {
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    const PerturbedMeasure m(c, PerturbationProfile{});
    const PotentialSplit r(c, PerturbationProfile{});
    const MatrixC a = assemble_truncated(c, m, r.total(), 2).dense();
    const Truncation t = truncate(c, 2);
    const MatrixC b = MatrixC(normalized_gauss_bonnet_matrix(t.graph, t.measure, t.potential));
    EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0) << name;
  }
}

TEST(Assemble, RandomPerturbationsStayHermitian) {
  cspec::testing::Rng rng(4);
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = cspec::testing::random_compact_profile(rng, c, 2);
      const PerturbedMeasure m(c, p);
      const PotentialSplit r(c, p);
      for (auto kind : {FiberKind::gauss_bonnet, FiberKind::edge_laplacian}) {
        const auto h = assemble_truncated(c, m, r.total(), 3, kind, p.table_radius());
        EXPECT_LE(h.hermiticity_defect(), 1e-14) << name;
        EXPECT_FALSE(h.radius_warning);
      }
    }
  }
}

TEST(Assemble, WarnsWhenSupportEscapes) {
  const Crystal c = catalog("z1");
  PerturbationProfile p;
  p.short_range.push_back({{ElementKind::vertex, 0}, LatticePoint{5}, 1.0});
  const PerturbedMeasure m(c, p);
  const PotentialSplit r(c, p);
  EXPECT_TRUE(assemble_truncated(c, m, r.total(), 5, FiberKind::gauss_bonnet, p.table_radius()).radius_warning);
  EXPECT_FALSE(assemble_truncated(c, m, r.total(), 6, FiberKind::gauss_bonnet, p.table_radius()).radius_warning);
  EXPECT_THROW(periodic(c, 0), ValidationError);
}

TEST(Assemble, EdgeLaplacianOnZIsPositive) {
  const Crystal c = catalog("z1");
  const auto vals = eigensolve_values(periodic(c, 20, FiberKind::edge_laplacian));
  EXPECT_GE(vals.front(), -1e-12);
  EXPECT_LE(vals.back(), 4.0 + 1e-12);
}

TEST(Eigensolve, TwoByTwo) {
  SparseC a(2, 2);
  a.insert(0, 1) = -2.0;
  a.insert(1, 0) = -2.0;
  const auto vals = eigensolve_values(HermitianMatrixHandle(a));
  ASSERT_EQ(vals.size(), 2u);
  EXPECT_NEAR(vals[0], -2.0, 1e-14);
  EXPECT_NEAR(vals[1], 2.0, 1e-14);
}

TEST(Eigensolve, CompressionBoundOnZ) {
  const auto vals = eigensolve_values(periodic(catalog("z1"), 200));
  EXPECT_GE(vals.front(), -2.0 - 1e-9);
  EXPECT_LE(vals.back(), 2.0 + 1e-9);
}

TEST(Eigensolve, ZSpectrumIsSymmetric) {
  auto vals = eigensolve_values(periodic(catalog("z1"), 60));
  const std::size_t n = vals.size();
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(vals[i], -vals[n - 1 - i], 1e-10);
}

TEST(Eigensolve, DenseAndLanczosAgreeOnExtremes) {
  const auto h = periodic(catalog("z1"), 50);
  for (auto which : {EigenRequest::Which::smallest, EigenRequest::Which::largest}) {
    EigenRequest dense{which, 10};
    dense.method = EigenRequest::Method::dense;
    EigenRequest lanczos = dense;
    lanczos.method = EigenRequest::Method::lanczos;
    const auto a = eigensolve(h, dense).values;
    const auto b = eigensolve(h, lanczos);
    ASSERT_EQ(b.values.size(), 10u);
    EXPECT_EQ(b.method, "lanczos");
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(a[i], b.values[i], 1e-8);
    EXPECT_LE(b.max_residual, 1e-9 * h.norm_bound());
  }
}

TEST(Eigensolve, ShiftInvertFindsInteriorEigenvalues) {
  const Crystal c = catalog("hexagonal");
  const PerturbationProfile p = vertex_bump(2.0, 2);
  const PerturbedMeasure m(c, p);
  const PotentialSplit r(c, p);
  const auto h = assemble_truncated(c, m, r.total(), 4);
  const auto all = eigensolve_values(h);
  for (double shift : {0.37, -1.1, 2.2}) {
    EigenRequest req{EigenRequest::Which::nearest, 5, shift};
    req.method = EigenRequest::Method::lanczos;
    req.vectors = true;
    const auto res = eigensolve(h, req);
    EigenRequest dreq = req;
    dreq.method = EigenRequest::Method::dense;
    const auto ref = eigensolve(h, dreq).values;
    ASSERT_EQ(res.values.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(res.values[i], ref[i], 1e-8) << shift;
    EXPECT_EQ(res.vectors.cols(), 5);
    EXPECT_LE(res.max_residual, 1e-9 * h.norm_bound());
  }
  EXPECT_GT(all.size(), 5u);
}

TEST(Eigensolve, VectorsSatisfyResidualBound) {
  cspec::testing::Rng rng(12);
  const Crystal c = catalog("z2");
  const auto p = cspec::testing::random_compact_profile(rng, c, 1);
  const PerturbedMeasure m(c, p);
  const PotentialSplit r(c, p);
  const auto h = assemble_truncated(c, m, r.total(), 4);
  EigenRequest req;
  req.vectors = true;
  const auto res = eigensolve(h, req);
  EXPECT_EQ(res.values.size(), h.dimension());
  EXPECT_LE(res.max_residual, 1e-9 * h.norm_bound());
}

TEST(Eigensolve, LanczosIsDeterministic) {
  const auto h = periodic(catalog("z1"), 80);
  EigenRequest req{EigenRequest::Which::largest, 6};
  req.method = EigenRequest::Method::lanczos;
  const auto a = eigensolve(h, req).values;
  const auto b = eigensolve(h, req).values;
  EXPECT_EQ(a, b);
}

TEST(Classify, PeriodicZHasNoGapEigenvalues) {
  const Crystal c = catalog("z1");
  BandStructure bands = compute_bands(c, 256);
  estimate_thresholds(c, bands);
  const auto rep = classify_spectrum(eigensolve_values(periodic(c, 100)), bands, 1e-6);
  EXPECT_EQ(rep.gap_count, 0u);
  EXPECT_EQ(rep.inside_count + rep.near_threshold_count, rep.eigenvalues.size());
}

TEST(Classify, BandEdgeIsNearThreshold) {
  const Crystal c = catalog("z1");
  BandStructure bands = compute_bands(c, 64);
  const auto rep = classify_spectrum({2.0, 2.0 + 5e-7, 1.0, 3.0, 3.0 + 1e-7, -4.0}, bands, 1e-6);
  ASSERT_EQ(rep.labels.size(), 6u);
  // sorted: -4, 1, 2, 2+5e-7, 3, 3+1e-7
  EXPECT_EQ(rep.labels[0], SpectralLabel::gap);
  EXPECT_EQ(rep.labels[1], SpectralLabel::inside);
  EXPECT_EQ(rep.labels[2], SpectralLabel::near_threshold);
  EXPECT_EQ(rep.labels[3], SpectralLabel::near_threshold);
  EXPECT_EQ(rep.labels[4], SpectralLabel::gap);
  EXPECT_EQ(rep.gap_count, 3u);
  ASSERT_EQ(rep.gap_eigenvalues.size(), 2u);
  EXPECT_EQ(rep.gap_eigenvalues[1].multiplicity, 2u);
  ASSERT_EQ(rep.gaps.size(), 2u);
  EXPECT_EQ(rep.gaps[0].count, 1u);
  EXPECT_EQ(rep.gaps[1].count, 2u);
  const auto j = rep.to_json();
  EXPECT_TRUE(j["gaps"][0]["lower"].is_null());
}

TEST(Classify, CountsAreConsistentOnRandomInput) {
  cspec::testing::Rng rng(77);
  const Crystal c = catalog("hexagonal");
  BandStructure bands = compute_bands(c, 16);
  estimate_thresholds(c, bands);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> vals;
    for (int i = 0; i < 30; ++i) vals.push_back(rng.uniform(-4.0, 4.0));
    const auto rep = classify_spectrum(vals, bands, 1e-3);
    EXPECT_EQ(rep.inside_count + rep.gap_count + rep.near_threshold_count, vals.size());
    std::size_t per_gap = 0;
    for (const auto& g : rep.gaps) per_gap += g.count;
    EXPECT_EQ(per_gap, rep.gap_count);
    std::size_t mult = 0;
    for (const auto& g : rep.gap_eigenvalues) mult += g.multiplicity;
    EXPECT_EQ(mult, rep.gap_count);
  }
}

TEST(Stability, BumpOnZProducesStableGapEigenvalue) {
  const Crystal c = catalog("z1");
  BandStructure bands = compute_bands(c, 256);
  estimate_thresholds(c, bands);
  const PerturbationProfile p = vertex_bump(5.0);
  const PerturbedMeasure m(c, p);
  const PotentialSplit r(c, p);
  const auto scan = gap_stability_scan(c, m, r.total(), {100, 200}, bands, 1e-6, FiberKind::gauss_bonnet,
                                       p.table_radius());
  EXPECT_TRUE(scan.stable);
  EXPECT_GE(scan.reports.back().gap_count, 1u);
  bool above = false;
  for (double x : scan.reports.back().eigenvalues) above = above || x > 2.0;
  EXPECT_TRUE(above);
  EXPECT_LE(scan.drift, 1e-4);
}

TEST(Stability, PeriodicDataIsStableWithZeroCount) {
  const Crystal c = catalog("z1");
  BandStructure bands = compute_bands(c, 128);
  estimate_thresholds(c, bands);
  const auto scan = gap_stability_scan(c, PeriodicMeasureField(c), PeriodicPotentialField(c), {20, 40, 80}, bands, 1e-6);
  EXPECT_TRUE(scan.stable);
  for (const auto& rep : scan.reports) EXPECT_EQ(rep.gap_count, 0u);
  EXPECT_EQ(scan.to_json()["verdict"], "stable");
}

TEST(Stability, RejectsBadRadii) {
  const Crystal c = catalog("z1");
  BandStructure bands = compute_bands(c, 16);
  const PeriodicMeasureField m(c);
  const PeriodicPotentialField r(c);
  EXPECT_THROW(gap_stability_scan(c, m, r, {10}, bands, 1e-6), ValidationError);
  EXPECT_THROW(gap_stability_scan(c, m, r, {20, 10}, bands, 1e-6), ValidationError);
}

TEST(Stability, SparsePathAgreesWithDense) {
  // Hexagonal r = 10 exceeds the dense limit; the targeted eigenvalues must contain
  // every gap eigenvalue the dense solve finds.
  const Crystal c = catalog("hexagonal");
  BandStructure bands = compute_bands(c, 32);
  estimate_thresholds(c, bands);
  const PerturbationProfile p = vertex_bump(4.0, 2);
  const PerturbedMeasure m(c, p);
  const PotentialSplit r(c, p);
  const auto h = assemble_truncated(c, m, r.total(), 10);
  ASSERT_EQ(h.storage(), HermitianMatrixHandle::Storage::sparse);
  const auto targeted = classify_spectrum(gap_targeted_eigenvalues(h, bands), bands, 1e-6);
  const auto full = classify_spectrum(eigensolve(h, EigenRequest{}).values, bands, 1e-6);
  EXPECT_EQ(targeted.gap_count, full.gap_count);
  ASSERT_EQ(targeted.gap_eigenvalues.size(), full.gap_eigenvalues.size());
  for (std::size_t i = 0; i < full.gap_eigenvalues.size(); ++i) {
    EXPECT_NEAR(targeted.gap_eigenvalues[i].value, full.gap_eigenvalues[i].value, 1e-8);
  }
}
