#pragma once

// Invariant suites behind `cspec verify` and the acceptance runner.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspec/crystal.hpp"
#include "cspec/symbols.hpp"

namespace cspec::cli {

struct VerifyOptions {
  std::uint64_t seed = 7;
  /// Restricts crystal-based suites to this crystal; otherwise each suite uses its catalog set.
  std::optional<CrystalDescriptor> crystal;
  std::string crystal_label;
  /// Replaces every suite threshold.
  std::optional<double> tolerance;

  std::size_t graphs = 1000;
  std::size_t max_vertices = 50;
  std::size_t xi_samples = 10000;
  std::size_t cochains = 500;
  std::int64_t cochain_radius = 5;
  std::size_t quadrature = 16;
  std::size_t perturbations = 100;
  std::int64_t lambda_max = std::int64_t{1} << 14;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  double max_residual = 0.0;
  double threshold = 0.0;
  std::size_t cases = 0;
  nlohmann::json detail = nlohmann::json::object();

  nlohmann::json to_json() const;
};

std::vector<std::string> suite_names();
bool is_suite(const std::string& name);
/// Throws LookupError for an unknown suite.
SuiteResult run_suite(const std::string& name, const VerifyOptions& options);

/// Coefficients of I U (H - H_0) U^* I^* u (or of the edge-Laplacian difference) for a
/// finitely supported cochain, computed through truncation matrices rather than kernels.
FourierSequence truncated_difference(const Crystal& c, const ElementField& m, const ElementField& r,
                                     const CrystalCochain& f, bool edges_only);

}  // namespace cspec::cli
