#include "cspec_tools/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>

#include "cspec/decay.hpp"
#include "cspec/errors.hpp"
#include "cspec/floquet.hpp"
#include "cspec/magnetic.hpp"
#include "cspec/perturbation.hpp"

namespace cspec::cli {
namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(n) - 1)); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  Complex complex() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }
  VectorC vector(std::size_t n) {
    VectorC v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex();
    return v;
  }
  LatticePoint point(int d, std::int64_t radius) {
    LatticePoint p(d);
    for (int a = 0; a < d; ++a) p[a] = integer(-radius, radius);
    return p;
  }

 private:
  std::mt19937_64 eng_;
};

OrientedGraph random_graph(Rng& rng, std::size_t max_vertices) {
  const std::size_t n = 1 + rng.index(max_vertices);
  const std::size_t l = rng.index(2 * n + 3);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t k = 0; k < l; ++k) edges.emplace_back(rng.index(n), rng.index(n));
  return OrientedGraph(n, std::move(edges));
}

Measure random_measure(Rng& rng, const OrientedGraph& g) {
  Measure m;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) m.vertex.push_back(rng.uniform(0.2, 5.0));
  for (std::size_t k = 0; k < g.edge_count(); ++k) m.edge.push_back(rng.uniform(0.2, 5.0));
  return m;
}

CrystalCochain random_cochain(Rng& rng, const Crystal& c, std::int64_t radius, bool with_vertices = true) {
  CrystalCochain f;
  for (const auto& mu : box_points(c.dimension(), radius)) {
    if (with_vertices) {
      for (std::size_t j = 0; j < c.vertex_count(); ++j) {
        if (rng.coin(0.6)) f.vertex[{j, mu}] = rng.complex();
      }
    }
    for (std::size_t k = 0; k < c.edge_count(); ++k) {
      if (rng.coin(0.6)) f.edge[{k, mu}] = rng.complex();
    }
  }
  return f;
}

PerturbationProfile random_profile(Rng& rng, const Crystal& c, std::int64_t radius, int entries) {
  PerturbationProfile p;
  auto element = [&]() {
    if (rng.coin()) return BaseElement{ElementKind::vertex, rng.index(c.vertex_count())};
    return BaseElement{ElementKind::edge, rng.index(c.edge_count())};
  };
  for (int i = 0; i < entries; ++i) {
    p.measure_multipliers.push_back({element(), rng.point(c.dimension(), radius), rng.uniform(0.3, 3.0)});
    p.short_range.push_back({element(), rng.point(c.dimension(), radius), rng.uniform(-2.0, 2.0)});
    p.long_range.push_back({element(), rng.point(c.dimension(), radius), rng.uniform(-2.0, 2.0)});
  }
  if (rng.coin()) p.long_range_laws.push_back({LawTarget::all, std::nullopt, rng.uniform(-2.0, 2.0), rng.uniform(0.2, 2.0)});
  return p;
}

struct Target {
  std::string label;
  Crystal crystal;
};

std::vector<Target> targets(const VerifyOptions& o, std::vector<std::string> defaults) {
  std::vector<Target> out;
  if (o.crystal) {
    out.push_back({o.crystal_label.empty() ? "custom" : o.crystal_label, Crystal::build(*o.crystal)});
    return out;
  }
  for (const auto& name : defaults) out.push_back({name, Crystal::build(standard_lattice(name))});
  return out;
}

double max_abs(const MatrixC& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double cochain_norm2(const Crystal& c, const CrystalCochain& f) {
  double s = 0.0;
  for (const auto& [k, v] : f.vertex) s += c.descriptor().vertices[k.base].measure * std::norm(v);
  for (const auto& [k, v] : f.edge) s += c.descriptor().edges[k.base].measure * std::norm(v);
  return s;
}

double cochain_difference(const CrystalCochain& a, const CrystalCochain& b) {
  double e = 0.0;
  auto edge_at = [](const CrystalCochain& f, const CellKey& k) {
    const auto it = f.edge.find(k);
    return it == f.edge.end() ? Complex{} : it->second;
  };
  for (const auto& [k, v] : a.vertex) e = std::max(e, std::abs(v - b.at_vertex(k)));
  for (const auto& [k, v] : b.vertex) e = std::max(e, std::abs(v - a.at_vertex(k)));
  for (const auto& [k, v] : a.edge) e = std::max(e, std::abs(v - edge_at(b, k)));
  for (const auto& [k, v] : b.edge) e = std::max(e, std::abs(v - edge_at(a, k)));
  return e;
}

class SuiteBuilder {
 public:
  SuiteBuilder(std::string name, double threshold, const VerifyOptions& o) {
    r_.name = std::move(name);
    r_.threshold = o.tolerance.value_or(threshold);
    r_.detail["seed"] = o.seed;
  }
  void record(const std::string& group, double residual) {
    r_.max_residual = std::max(r_.max_residual, residual);
    ++r_.cases;
    auto& g = r_.detail["max_residual_by_case"][group];
    g = g.is_null() ? residual : std::max(g.get<double>(), residual);
  }
  SuiteResult finish() {
    r_.passed = std::isfinite(r_.max_residual) && r_.max_residual <= r_.threshold;
    return std::move(r_);
  }
  SuiteResult& result() { return r_; }

 private:
  SuiteResult r_;
};

SuiteResult suite_adjointness(const VerifyOptions& o) {
  SuiteBuilder s("adjointness", 1e-12, o);
  Rng rng(o.seed);
  for (std::size_t t = 0; t < o.graphs; ++t) {
    const auto g = random_graph(rng, o.max_vertices);
    const auto m = random_measure(rng, g);
    const VectorC f = rng.vector(g.vertex_count());
    const VectorC h = rng.vector(g.edge_count());
    const Complex lhs = inner_product1(apply_d(g, f), h, m);
    const Complex rhs = inner_product0(f, apply_d_star(g, m, h), m);
    const double nf = std::sqrt(inner_product0(f, f, m).real());
    const double nh = std::sqrt(inner_product1(h, h, m).real());
    const double scale = nf * nh;
    s.record("graphs", scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs));
  }
  return s.finish();
}

SuiteResult suite_factorization(const VerifyOptions& o) {
  SuiteBuilder s("factorization", 1e-12, o);
  Rng rng(o.seed + 1);
  for (std::size_t t = 0; t < o.graphs; ++t) {
    const auto g = random_graph(rng, o.max_vertices);
    const auto m = random_measure(rng, g);
    const Cochain f{rng.vector(g.vertex_count()), rng.vector(g.edge_count())};
    const Cochain d2 = apply_gauss_bonnet(g, m, apply_gauss_bonnet(g, m, f));
    const Cochain hodge{-apply_laplacian0(g, m, f.vertex), -apply_laplacian1(g, m, f.edge)};
    const double nf = norm(f, m);
    const double err = norm(d2 - hodge, m);
    s.record("graphs", nf > 0.0 ? err / nf : err);
  }
  return s.finish();
}

SuiteResult suite_hermiticity(const VerifyOptions& o) {
  SuiteBuilder s("hermiticity", 1e-13, o);
  Rng rng(o.seed + 2);
  for (const auto& [label, c] : targets(o, catalog_names())) {
    const Measure m = c.base_measure();
    const Potential r = c.base_potential();
    for (std::size_t t = 0; t < o.xi_samples; ++t) {
      std::vector<double> xi;
      for (int a = 0; a < c.dimension(); ++a) xi.push_back(rng.uniform(0.0, 1.0));
      const MatrixC h0 = assemble_h0(c, TorusPoint(xi));
      const MatrixC mag = magnetic_gauss_bonnet_matrix(c.base_graph(), m, r, bloch_flux(c, xi));
      s.record(label + ":magnetic", max_abs(h0 - mag));
      s.record(label + ":hermitian", max_abs(h0 - h0.adjoint()));
    }
  }
  return s.finish();
}

SuiteResult suite_bands(const VerifyOptions& o) {
  SuiteBuilder s("bands", 1e-10, o);
  const Crystal z = Crystal::build(standard_lattice("z1"));
  const auto zb = compute_bands(z, 256);
  for (std::size_t p = 0; p < zb.points.size(); ++p) {
    const double v = 2.0 * std::abs(std::sin(M_PI * zb.points[p].xi[0]));
    s.record("z1:gauss_bonnet", std::max(std::abs(zb.eigenvalues[p][0] + v), std::abs(zb.eigenvalues[p][1] - v)));
  }
  const auto ze = compute_bands(z, 256, FiberKind::edge_laplacian);
  for (std::size_t p = 0; p < ze.points.size(); ++p) {
    const double v = 2.0 - 2.0 * std::cos(2.0 * M_PI * ze.points[p].xi[0]);
    s.record("z1:edge", std::abs(ze.eigenvalues[p][0] - v));
  }
  const Crystal hex = Crystal::build(standard_lattice("hexagonal"));
  for (const auto& xi : torus_grid(2, 64)) {
    const MatrixC h = assemble_h0(hex, xi);
    const MatrixC block = (h * h).topLeftCorner(2, 2);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<MatrixC>(block).eigenvalues();
    const double r =
        std::abs(1.0 + std::polar(1.0, 2.0 * M_PI * xi.xi[0]) + std::polar(1.0, 2.0 * M_PI * xi.xi[1]));
    s.record("hexagonal:vertex_block", std::max(std::abs(ev(0) - (3.0 - r)), std::abs(ev(1) - (3.0 + r))));
  }
  return s.finish();
}

SuiteResult suite_parseval(const VerifyOptions& o) {
  SuiteBuilder s("parseval", 1e-10, o);
  Rng rng(o.seed + 3);
  const auto ts = targets(o, catalog_names());
  for (std::size_t t = 0; t < o.cochains; ++t) {
    const auto& [label, c] = ts[t % ts.size()];
    const auto f = random_cochain(rng, c, rng.integer(0, o.cochain_radius));
    const auto samples = bloch_samples(c, f, o.quadrature);
    double quad = 0.0;
    for (const auto& u : samples) quad += u.squaredNorm();
    quad /= static_cast<double>(samples.size());
    const double exact = cochain_norm2(c, f);
    s.record(label + ":parseval", std::abs(quad - exact) / std::max(1.0, exact));
    s.record(label + ":round_trip", cochain_difference(inverse_bloch(c, samples, o.quadrature), f));
  }
  s.result().detail["quadrature"] = o.quadrature;
  return s.finish();
}

SuiteResult suite_claim(const VerifyOptions& o) {
  SuiteBuilder s("claim", 1e-10, o);
  Rng rng(o.seed + 4);
  for (const auto& [label, c] : targets(o, {"z1", "hexagonal"})) {
    const std::int64_t support = c.dimension() == 1 ? 4 : 2;
    for (std::size_t t = 0; t < o.perturbations; ++t) {
      const auto profile = random_profile(rng, c, 2, 6);
      const PerturbedMeasure m(c, profile);
      const PotentialSplit r(c, profile);
      const auto symbols = build_gb_symbols(c, m, r.short_range(), r.long_range(), rng.index(c.vertex_count()));
      const auto f = random_cochain(rng, c, support);
      const auto lhs = truncated_difference(c, m, r.total(), f, false);
      const auto rhs = apply_gb_symbols(symbols, fourier_coefficients(c, f));
      s.record(label, max_difference(lhs, rhs));
    }
  }
  return s.finish();
}

SuiteResult suite_t2(const VerifyOptions& o) {
  SuiteBuilder s("t2", 1e-10, o);
  Rng rng(o.seed + 5);
  for (const auto& [label, c] : targets(o, {"z1", "hexagonal"})) {
    const std::int64_t support = c.dimension() == 1 ? 4 : 2;
    for (std::size_t t = 0; t < o.perturbations; ++t) {
      const PerturbedMeasure m(c, random_profile(rng, c, 2, 6));
      const auto symbols = build_edge_symbols(c, m);
      const auto f = random_cochain(rng, c, support, false);
      const auto lhs = truncated_difference(c, m, PeriodicPotentialField(c), f, true);
      const auto rhs = apply_edge_symbols(symbols, edge_fourier_coefficients(c, f));
      s.record(label, max_difference(lhs, rhs));
    }
  }
  return s.finish();
}

SuiteResult suite_dagger(const VerifyOptions& o) {
  SuiteBuilder s("dagger", 1e-13, o);
  Rng rng(o.seed + 6);
  for (const auto& [label, c] : targets(o, catalog_names())) {
    const PerturbedMeasure m(c, random_profile(rng, c, 2, 10));
    const auto sym = build_edge_symbols(c, m);
    const std::size_t l = c.edge_count();
    const auto window = box_points(c.dimension(), c.dimension() == 1 ? 8 : 4);
    const std::pair<char, char> pairs[] = {{'a', 'a'}, {'b', 'c'}, {'c', 'b'}, {'d', 'd'}};
    for (std::size_t j = 0; j < l; ++j) {
      for (std::size_t ell = 0; ell < l; ++ell) {
        for (const auto& [from, to] : pairs) {
          const Symbol lhs = symbol_dagger(sym.get(from, j, ell));
          const Symbol& rhs = sym.get(to, ell, j);
          const std::string group = label + ":" + from + "->" + to;
          if (lhs.shift != rhs.shift) {
            s.record(group, std::numeric_limits<double>::infinity());
            continue;
          }
          for (const auto& mu : window) s.record(group, max_abs(lhs(mu) - rhs(mu)));
        }
      }
    }
  }
  return s.finish();
}

SuiteResult suite_decay(const VerifyOptions& o) {
  SuiteResult r;
  r.name = "decay";
  r.threshold = 0.0;
  r.detail["lambda_max"] = o.lambda_max;
  struct Case {
    std::string name;
    std::function<DecayReport()> run;
    DecayVerdict expected;
  };
  auto power = [](double p) {
    return RadialProfile([p](std::int64_t k) { return k == 0 ? 1.0 : std::pow(static_cast<double>(k), -p); });
  };
  auto power2 = [](double p) {
    return ScalarProfile([p](const LatticePoint& mu) {
      const auto k = mu.sup_norm();
      return k == 0 ? 1.0 : std::pow(static_cast<double>(k), -p);
    });
  };
  const auto lm = o.lambda_max;
  DecayOptions opts;
  opts.seed = o.seed;
  const std::vector<Case> cases = {
      {"|mu|^-1.5 short", [&] { return decay_report(power(1.5), DecayCondition::short_range, lm, opts); },
       DecayVerdict::converging},
      {"|mu|^-0.5 short", [&] { return decay_report(power(0.5), DecayCondition::short_range, lm, opts); },
       DecayVerdict::diverging},
      {"|mu|^-0.5 long", [&] { return decay_report(power(0.5), DecayCondition::long_range, lm, opts); },
       DecayVerdict::converging},
      {"constant long", [&] { return decay_report(RadialProfile([](std::int64_t) { return 1.0; }),
                                                  DecayCondition::long_range, lm, opts); },
       DecayVerdict::converging},
      {"constant short", [&] { return decay_report(RadialProfile([](std::int64_t) { return 1.0; }),
                                                   DecayCondition::short_range, lm, opts); },
       DecayVerdict::diverging},
      {"d=2 |mu|^-1.5 short", [&] { return decay_report(power2(1.5), 2, DecayCondition::short_range, lm, opts); },
       DecayVerdict::converging},
      {"d=2 |mu|^-0.5 long", [&] { return decay_report(power2(0.5), 2, DecayCondition::long_range, lm, opts); },
       DecayVerdict::converging},
  };
  std::size_t wrong = 0;
  for (const auto& k : cases) {
    const auto rep = k.run();
    const bool ok = rep.verdict == k.expected;
    wrong += ok ? 0 : 1;
    r.detail["cases"].push_back({{"case", k.name},
                                 {"expected", to_string(k.expected)},
                                 {"verdict", to_string(rep.verdict)},
                                 {"median_ratio", rep.median_ratio},
                                 {"note", rep.note}});
    ++r.cases;
  }
  r.max_residual = static_cast<double>(wrong);
  r.passed = wrong == 0;
  return r;
}

using SuiteFn = SuiteResult (*)(const VerifyOptions&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"adjointness", suite_adjointness}, {"factorization", suite_factorization},
      {"hermiticity", suite_hermiticity}, {"bands", suite_bands},
      {"parseval", suite_parseval},       {"claim", suite_claim},
      {"t2", suite_t2},                   {"dagger", suite_dagger},
      {"decay", suite_decay},
  };
  return r;
}

}  // namespace

nlohmann::json SuiteResult::to_json() const {
  return {{"suite", name},         {"passed", passed}, {"max_residual", max_residual},
          {"threshold", threshold}, {"cases", cases},   {"detail", detail}};
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

bool is_suite(const std::string& name) {
  const auto& r = registry();
  return std::any_of(r.begin(), r.end(), [&](const auto& e) { return e.first == name; });
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& options) {
  for (const auto& [n, fn] : registry()) {
    if (n == name) return fn(options);
  }
  throw LookupError("unknown suite: " + name);
}

FourierSequence truncated_difference(const Crystal& c, const ElementField& m, const ElementField& r,
                                     const CrystalCochain& f, bool edges_only) {
  const std::int64_t radius = f.support_radius() + 3 * c.max_eta_norm() + 2;
  const Truncation tm = truncate(c, radius, m, r);
  const Truncation t0 = truncate(c, radius);
  const std::size_t nv = tm.vertices.size();
  const std::size_t ne = tm.edges.size();
  const auto& d = c.descriptor();

  VectorC v = VectorC::Zero(static_cast<Eigen::Index>(edges_only ? ne : nv + ne));
  const Eigen::Index off = edges_only ? 0 : static_cast<Eigen::Index>(nv);
  if (!edges_only) {
    for (const auto& [k, x] : f.vertex) {
      v(static_cast<Eigen::Index>(*tm.vertex_index(k))) = std::sqrt(d.vertices[k.base].measure) * x;
    }
  }
  for (const auto& [k, x] : f.edge) {
    v(off + static_cast<Eigen::Index>(*tm.edge_index(k))) = std::sqrt(d.edges[k.base].measure) * x;
  }

  VectorC w;
  if (edges_only) {
    const SparseC dm = normalized_d_matrix(tm.graph, tm.measure);
    const SparseC d0 = normalized_d_matrix(t0.graph, t0.measure);
    const SparseC dma = dm.adjoint();
    const SparseC d0a = d0.adjoint();
    w = dm * VectorC(dma * v) - d0 * VectorC(d0a * v);
  } else {
    const SparseC hm = normalized_gauss_bonnet_matrix(tm.graph, tm.measure, tm.potential);
    const SparseC h0 = normalized_gauss_bonnet_matrix(t0.graph, t0.measure, t0.potential);
    w = hm * v - h0 * v;
  }

  const std::size_t width = edges_only ? c.edge_count() : c.fiber_dimension();
  FourierSequence out;
  auto slot = [&](const LatticePoint& mu) -> VectorC& {
    return out.emplace(mu, VectorC::Zero(static_cast<Eigen::Index>(width))).first->second;
  };
  if (!edges_only) {
    for (std::size_t i = 0; i < nv; ++i) {
      const Complex x = w(static_cast<Eigen::Index>(i));
      if (x != Complex{}) slot(tm.vertices[i].cell)(static_cast<Eigen::Index>(tm.vertices[i].base)) += x;
    }
  }
  for (std::size_t k = 0; k < ne; ++k) {
    const Complex x = w(off + static_cast<Eigen::Index>(k));
    const std::size_t col = (edges_only ? 0 : c.vertex_count()) + tm.edges[k].base;
    if (x != Complex{}) slot(tm.edges[k].cell)(static_cast<Eigen::Index>(col)) += x;
  }
  return out;
}

}  // namespace cspec::cli
