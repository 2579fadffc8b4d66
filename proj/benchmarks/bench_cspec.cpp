#include <benchmark/benchmark.h>

#include <cmath>

#include "cspec/decay.hpp"
#include "cspec/floquet.hpp"
#include "cspec/perturbation.hpp"
#include "cspec/spectra.hpp"
#include "cspec/symbols.hpp"

using namespace cspec;

namespace {

const Crystal& catalog(const std::string& name) {
  static std::map<std::string, Crystal> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, Crystal::build(standard_lattice(name))).first;
  return it->second;
}

void BM_AssembleH0(benchmark::State& state) {
  const Crystal& c = catalog("hexagonal");
  const TorusPoint xi({0.1, 0.7});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_h0(c, xi));
}
BENCHMARK(BM_AssembleH0);

void BM_ComputeBands(benchmark::State& state) {
  const Crystal& c = catalog("hexagonal");
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_bands(c, n));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_ComputeBands)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DenseTruncatedSpectrum(benchmark::State& state) {
  const Crystal& c = catalog("z1");
  const PerturbedMeasure m(c);
  const PotentialSplit r(c);
  const auto h = assemble_truncated(c, m, r.total(), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eigensolve_values(h));
  state.counters["dimension"] = static_cast<double>(h.dimension());
}
BENCHMARK(BM_DenseTruncatedSpectrum)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_ShiftInvertNearest(benchmark::State& state) {
  const Crystal& c = catalog("hexagonal");
  const PerturbedMeasure m(c);
  const PotentialSplit r(c);
  const auto h = assemble_truncated(c, m, r.total(), state.range(0));
  EigenRequest req;
  req.which = EigenRequest::Which::nearest;
  req.count = 8;
  req.shift = 2.1;
  req.method = EigenRequest::Method::lanczos;
  for (auto _ : state) benchmark::DoNotOptimize(eigensolve(h, req));
  state.counters["dimension"] = static_cast<double>(h.dimension());
}
BENCHMARK(BM_ShiftInvertNearest)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_GaussBonnetSymbols(benchmark::State& state) {
  const Crystal& c = catalog("hexagonal");
  PerturbationProfile p;
  p.measure_laws.push_back({LawTarget::all, std::nullopt, 0.5, 1.5});
  p.long_range_laws.push_back({LawTarget::all, std::nullopt, 1.0, 0.5});
  const PerturbedMeasure m(c, p);
  const PotentialSplit r(c, p);
  const auto s = build_gb_symbols(c, m, r.short_range(), r.long_range());
  FourierSequence u;
  for (const auto& mu : box_points(2, state.range(0))) u[mu] = VectorC::Ones(5);
  for (auto _ : state) benchmark::DoNotOptimize(apply_gb_symbols(s, u));
}
BENCHMARK(BM_GaussBonnetSymbols)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_DecayRadial(benchmark::State& state) {
  const RadialProfile g = [](std::int64_t k) { return std::pow(1.0 + static_cast<double>(k), -1.5); };
  for (auto _ : state) benchmark::DoNotOptimize(decay_report(g, DecayCondition::long_range, state.range(0)));
}
BENCHMARK(BM_DecayRadial)->Arg(1 << 14)->Arg(1 << 20);

void BM_DecayScan2D(benchmark::State& state) {
  const ScalarProfile b = [](const LatticePoint& mu) {
    return std::pow(1.0 + static_cast<double>(mu.sup_norm()), -1.5);
  };
  for (auto _ : state) benchmark::DoNotOptimize(decay_report(b, 2, DecayCondition::short_range, state.range(0)));
}
BENCHMARK(BM_DecayScan2D)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
