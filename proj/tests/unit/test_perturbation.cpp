#include <gtest/gtest.h>

#include <cmath>

#include "cspec/errors.hpp"
#include "cspec/perturbation.hpp"
#include "generators.hpp"

using namespace cspec;
using cspec::testing::Rng;

namespace {

Crystal catalog(const std::string& name) { return Crystal::build(standard_lattice(name)); }

double max_cochain_difference(const CrystalCochain& a, const CrystalCochain& b) {
  double e = 0.0;
  auto at = [](const std::map<CellKey, Complex>& m, const CellKey& k) {
    const auto it = m.find(k);
    return it == m.end() ? Complex{} : it->second;
  };
  for (const auto& [k, v] : a.vertex) e = std::max(e, std::abs(v - at(b.vertex, k)));
  for (const auto& [k, v] : b.vertex) e = std::max(e, std::abs(v - at(a.vertex, k)));
  for (const auto& [k, v] : a.edge) e = std::max(e, std::abs(v - at(b.edge, k)));
  for (const auto& [k, v] : b.edge) e = std::max(e, std::abs(v - at(a.edge, k)));
  return e;
}

// H f through a truncation large enough to contain supp f and its image, in the
// m_Gamma^{1/2}-normalized basis: H = J D(m) J^* + R.
CrystalCochain oracle_H(const Crystal& c, const ElementField& m, const ElementField& r, const CrystalCochain& f) {
  const std::int64_t radius = f.support_radius() + 2 * c.max_eta_norm() + 1;
  const Truncation t = truncate(c, radius, m, r);
  const MatrixC a = MatrixC(normalized_gauss_bonnet_matrix(t.graph, t.measure, t.potential));
  const auto& d = c.descriptor();
  const std::size_t nv = t.vertices.size();
  VectorC v = VectorC::Zero(a.rows());
  for (const auto& [k, x] : f.vertex) v(static_cast<Eigen::Index>(*t.vertex_index(k))) = std::sqrt(d.vertices[k.base].measure) * x;
  for (const auto& [k, x] : f.edge) v(static_cast<Eigen::Index>(nv + *t.edge_index(k))) = std::sqrt(d.edges[k.base].measure) * x;
  const VectorC w = a * v;
  CrystalCochain out;
  for (std::size_t i = 0; i < nv; ++i) {
    const Complex x = w(static_cast<Eigen::Index>(i));
    if (x != Complex{}) out.vertex[t.vertices[i]] = x / std::sqrt(d.vertices[t.vertices[i].base].measure);
  }
  for (std::size_t k = 0; k < t.edges.size(); ++k) {
    const Complex x = w(static_cast<Eigen::Index>(nv + k));
    if (x != Complex{}) out.edge[t.edges[k]] = x / std::sqrt(d.edges[t.edges[k].base].measure);
  }
  return out;
}

}  // namespace

TEST(RadialLaw, Evaluation) {
  const RadialLaw law{LawTarget::edges, std::nullopt, 2.0, 1.5};
  EXPECT_DOUBLE_EQ(law.at(LatticePoint{0}), 2.0);
  EXPECT_DOUBLE_EQ(law.at(LatticePoint{-3}), 2.0 * std::pow(4.0, -1.5));
  EXPECT_TRUE(law.applies(ElementKind::edge, 3));
  EXPECT_FALSE(law.applies(ElementKind::vertex, 0));
  const RadialLaw one{LawTarget::vertices, 1, 1.0, 1.0};
  EXPECT_TRUE(one.applies(ElementKind::vertex, 1));
  EXPECT_FALSE(one.applies(ElementKind::vertex, 0));
}

TEST(PerturbedMeasure, MultipliersCompose) {
  const Crystal c = catalog("hexagonal");
  PerturbationProfile p;
  p.measure_multipliers.push_back({{ElementKind::vertex, 1}, LatticePoint{1, 0}, 2.0});
  p.measure_multipliers.push_back({{ElementKind::vertex, 1}, LatticePoint{1, 0}, 1.5});
  p.measure_laws.push_back({LawTarget::all, std::nullopt, 0.5, 2.0});
  const PerturbedMeasure m(c, p);
  const double law = 1.0 + 0.5 * std::pow(2.0, -2.0);
  EXPECT_DOUBLE_EQ(m.multiplier(ElementKind::vertex, 1, LatticePoint{1, 0}), 3.0 * law);
  EXPECT_DOUBLE_EQ(m.vertex(1, LatticePoint{1, 0}), c.descriptor().vertices[1].measure * 3.0 * law);
  EXPECT_DOUBLE_EQ(m.edge(0, LatticePoint{0, 0}), c.descriptor().edges[0].measure * 1.5);
  const PerturbedMeasure plain(c);
  EXPECT_DOUBLE_EQ(plain.vertex(0, LatticePoint{7, -2}), c.descriptor().vertices[0].measure);
}

TEST(Profile, Validation) {
  const Crystal c = catalog("z1");
  PerturbationProfile p;
  p.measure_multipliers.push_back({{ElementKind::vertex, 0}, LatticePoint{0}, -1.0});
  EXPECT_THROW(p.validate(c), ValidationError);
  p = {};
  p.measure_multipliers.push_back({{ElementKind::edge, 4}, LatticePoint{0}, 1.0});
  EXPECT_THROW(p.validate(c), ValidationError);
  p = {};
  p.measure_laws.push_back({LawTarget::all, std::nullopt, -1.0, 1.0});
  EXPECT_THROW(p.validate(c), ValidationError);
  p = {};
  p.short_range.push_back({{ElementKind::vertex, 0}, LatticePoint{0, 0}, 1.0});
  EXPECT_THROW(p.validate(c), ValidationError);
  p = {};
  p.short_range.push_back({{ElementKind::vertex, 0}, LatticePoint{4}, 1.0});
  p.long_range_laws.push_back({LawTarget::all, std::nullopt, 1.0, 0.5});
  EXPECT_NO_THROW(p.validate(c));
  EXPECT_EQ(p.table_radius(), 4);
  EXPECT_TRUE(p.has_laws());
}

TEST(Profile, JsonRoundTrip) {
  Rng rng(1);
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    auto p = cspec::testing::random_compact_profile(rng, c, 3);
    p.measure_laws.push_back({LawTarget::edges, 0, 0.25, 2.0});
    p.long_range_laws.push_back({LawTarget::all, std::nullopt, 1.0, 0.5});
    const auto j = profile_to_json(p);
    const auto back = profile_from_json(nlohmann::json::parse(j.dump()), c.dimension());
    EXPECT_EQ(profile_to_json(back).dump(), j.dump()) << name;
  }
}

TEST(Profile, JsonSingleLawAndErrors) {
  const auto p = profile_from_json(nlohmann::json::parse(R"({
    "measure_multipliers": [{"vertex": 0, "mu": [2], "factor": 3.0}],
    "potential": {"R_S": [{"vertex": 0, "mu": [0], "value": 5.0}],
                  "R_L": {"target": "vertices", "amplitude": 1.0, "exponent": 0.5}}})"),
                                   1);
  ASSERT_EQ(p.measure_multipliers.size(), 1u);
  ASSERT_EQ(p.short_range.size(), 1u);
  ASSERT_EQ(p.long_range_laws.size(), 1u);
  EXPECT_EQ(p.long_range_laws[0].target, LawTarget::vertices);
  try {
    profile_from_json(nlohmann::json::parse(R"({"potential": {"R_S": [{"vertex": 0, "mu": [0, 1], "value": 1}]}})"), 1);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "potential.R_S[0].mu");
  }
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"measure_multipliers": [{"mu": [0], "factor": 1}]})"), 1),
               ValidationError);
  EXPECT_THROW(load_profile("/nonexistent/profile.json", 1), LookupError);
}

TEST(PotentialSplit, TotalIsTheSum) {
  Rng rng(2);
  const Crystal c = catalog("ladder");
  auto p = cspec::testing::random_compact_profile(rng, c, 2);
  p.long_range_laws.push_back({LawTarget::all, std::nullopt, 0.7, 0.3});
  const PotentialSplit r(c, p);
  for (const auto& mu : box_points(1, 4)) {
    for (std::size_t j = 0; j < c.vertex_count(); ++j) {
      EXPECT_DOUBLE_EQ(r.total().vertex(j, mu),
                       r.periodic().vertex(j, mu) + r.short_range().vertex(j, mu) + r.long_range().vertex(j, mu));
    }
    for (std::size_t k = 0; k < c.edge_count(); ++k) {
      EXPECT_DOUBLE_EQ(r.total().edge(k, mu),
                       r.periodic().edge(k, mu) + r.short_range().edge(k, mu) + r.long_range().edge(k, mu));
    }
  }
}

TEST(ApplyH, MatchesTruncatedMatrix) {
  Rng rng(3);
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    for (int t = 0; t < 10; ++t) {
      const auto p = cspec::testing::random_compact_profile(rng, c, 2);
      const PerturbedMeasure m(c, p);
      const PotentialSplit r(c, p);
      const auto f = cspec::testing::random_crystal_cochain(rng, c, 2);
      const auto got = apply_perturbed_H(c, m, r.total(), f, 2 + c.max_eta_norm());
      EXPECT_LE(max_cochain_difference(got, oracle_H(c, m, r.total(), f)), 1e-12) << name;
    }
  }
}

TEST(ApplyH, PeriodicDataGivesH0) {
  Rng rng(4);
  for (const auto& name : catalog_names()) {
    const Crystal c = catalog(name);
    const PerturbedMeasure m(c);
    const PotentialSplit r(c);
    const auto f = cspec::testing::random_crystal_cochain(rng, c, 2);
    const auto a = apply_perturbed_H(c, m, r.total(), f, 3);
    const auto b = apply_periodic_H0(c, f, 3);
    EXPECT_LE(max_cochain_difference(a, b), 1e-14) << name;
  }
}

TEST(ApplyH, WindowTooSmall) {
  const Crystal c = catalog("z1");
  CrystalCochain f;
  f.vertex[{0, LatticePoint{3}}] = 1.0;
  EXPECT_THROW(apply_periodic_H0(c, f, 3), WindowError);
  EXPECT_NO_THROW(apply_periodic_H0(c, f, 4));
}

TEST(Paths, FindAndTelescope) {
  const Crystal c = catalog("hexagonal");
  const CrystalVertex from{0, LatticePoint{0, 0}};
  const CrystalVertex to{1, LatticePoint{2, -1}};
  const auto path = find_path(c, from, to);
  ASSERT_FALSE(path.empty());
  EXPECT_EQ(c.origin(path.front()), from);
  EXPECT_EQ(c.terminus(path.back()), to);
  for (std::size_t i = 1; i < path.size(); ++i) EXPECT_EQ(c.origin(path[i]), c.terminus(path[i - 1]));

  const auto tp = telescope_path(c, 0, {ElementKind::edge, 2});
  ASSERT_TRUE(tp.final_edge.has_value());

  const PotentialSplit flat(c);
  for (const auto& mu : box_points(2, 3)) {
    EXPECT_EQ(path_telescope(c, flat.long_range(), 0, {ElementKind::vertex, 1}, mu), 0.0);
  }
  PerturbationProfile p;
  p.long_range_laws.push_back({LawTarget::all, std::nullopt, 2.0, 0.5});
  const PotentialSplit rl(c, p);
  for (const auto& mu : box_points(2, 3)) {
    const double bound = path_telescope(c, rl.long_range(), tp, mu);
    const double direct = std::abs(rl.long_range().edge(2, mu) - rl.long_range().vertex(0, mu));
    EXPECT_GE(bound + 1e-15, direct);
  }
}

TEST(Paths, DisconnectedCrystalHasNoPath) {
  // Two base vertices, each carrying its own loop: the lifts never meet.
  CrystalDescriptor d;
  d.dimension = 1;
  d.vertices = {{"a", 1.0, 0.0}, {"b", 1.0, 0.0}};
  d.edges = {{0, 0, LatticePoint{1}, 1.0, 0.0}, {1, 1, LatticePoint{1}, 1.0, 0.0}};
  const Crystal c = Crystal::build(d);
  EXPECT_THROW(find_path(c, {0, LatticePoint{0}}, {1, LatticePoint{0}}, 3), ConfigurationError);
  EXPECT_THROW(telescope_path(c, 0, {ElementKind::vertex, 1}), ConfigurationError);
}
