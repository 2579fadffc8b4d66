#pragma once

// Truncated operators, Hermitian eigensolvers and classification of eigenvalues
// against a band structure.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspec/crystal.hpp"
#include "cspec/floquet.hpp"
#include "cspec/graph.hpp"

namespace cspec {

/// Below this dimension matrices are held and diagonalized densely.
inline constexpr std::size_t dense_limit = 2000;

class HermitianMatrixHandle {
 public:
  enum class Storage { dense, sparse };

  /// Symmetrizes (A + A^*)/2 and records the defect max |A - A^*| it removed.
  explicit HermitianMatrixHandle(SparseC matrix);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(sparse_.rows()); }
  Storage storage() const noexcept { return dimension() < dense_limit ? Storage::dense : Storage::sparse; }
  Complex entry(std::size_t i, std::size_t j) const;
  const SparseC& sparse() const noexcept { return sparse_; }
  MatrixC dense() const { return MatrixC(sparse_); }
  /// No imaginary part anywhere; the real solvers apply.
  bool is_real() const noexcept { return real_; }
  double hermiticity_defect() const noexcept { return defect_; }
  /// Max absolute row sum, an upper bound for the operator norm.
  double norm_bound() const noexcept { return norm_bound_; }

  /// Set when the perturbation table reaches past the truncation ball.
  bool radius_warning = false;
  std::int64_t radius = 0;

 private:
  SparseC sparse_;
  bool real_ = true;
  double defect_ = 0.0;
  double norm_bound_ = 0.0;
};

/// Matrix of H (or of the edge operator d d^* + R on edges) on the truncation ball of
/// the given radius, in the m_Gamma^{1/2}-normalized basis. `support_radius` is the
/// largest |mu| carrying a tabulated perturbation, -1 when unknown or none.
HermitianMatrixHandle assemble_truncated(const Crystal& c, const ElementField& m, const ElementField& r,
                                         std::int64_t radius, FiberKind kind = FiberKind::gauss_bonnet,
                                         std::int64_t support_radius = -1);

struct EigenRequest {
  enum class Which { all, smallest, largest, nearest };
  enum class Method { automatic, dense, lanczos };

  Which which = Which::all;
  std::size_t count = 0;  // ignored for Which::all
  double shift = 0.0;     // target of Which::nearest
  Method method = Method::automatic;
  bool vectors = false;
  std::uint64_t seed = 0x1a2c05;
};

struct EigenResult {
  std::vector<double> values;  // sorted increasingly
  MatrixC vectors;             // columns match values when requested
  /// max ||A v - lambda v|| over returned pairs; -1 when vectors were not formed.
  double max_residual = -1.0;
  std::size_t krylov_dimension = 0;
  std::string method;
};

/// Dense SelfAdjointEigenSolver, or Lanczos with full reorthogonalization (shift-invert
/// through a sparse LU for Which::nearest). Throws NumericError when a returned pair
/// misses the residual bound 1e-9 ||A||.
EigenResult eigensolve(const HermitianMatrixHandle& a, const EigenRequest& request = {});
std::vector<double> eigensolve_values(const HermitianMatrixHandle& a);

enum class SpectralLabel { inside, gap, near_threshold };
std::string to_string(SpectralLabel l);

struct GapCount {
  double lower = 0.0;  // -inf / +inf for the outer gaps
  double upper = 0.0;
  std::size_t count = 0;
};

struct GapEigenvalue {
  double value = 0.0;  // cluster mean
  std::size_t multiplicity = 1;
};

struct SpectrumReport {
  std::int64_t radius = 0;
  double tolerance = 0.0;
  std::vector<double> eigenvalues;
  std::vector<SpectralLabel> labels;
  std::vector<GapCount> gaps;
  std::vector<GapEigenvalue> gap_eigenvalues;
  std::size_t inside_count = 0;
  std::size_t gap_count = 0;  // with multiplicity
  std::size_t near_threshold_count = 0;
  bool radius_warning = false;

  nlohmann::json to_json() const;
};

/// Labels each eigenvalue: near_threshold within tol of a band endpoint or threshold,
/// inside the band union, otherwise gap. Gap clusters of width <= tol count once with multiplicity.
SpectrumReport classify_spectrum(const std::vector<double>& eigenvalues, const BandStructure& bands, double tol);

struct StabilityScan {
  std::vector<SpectrumReport> reports;  // one per radius, in the given order
  bool stable = false;
  /// max location change of gap eigenvalues between the top two radii; -1 when counts differ.
  double drift = -1.0;
  double location_tolerance = 1e-4;

  std::string verdict() const { return stable ? "stable" : "unsettled"; }
  nlohmann::json to_json() const;
};

/// Truncates at each radius (in parallel), diagonalizes and classifies. Stable when the two
/// largest radii agree on the gap count and on every gap location within location_tolerance.
/// Needs at least two increasing radii; throws ValidationError otherwise.
StabilityScan gap_stability_scan(const Crystal& c, const ElementField& m, const ElementField& r,
                                 const std::vector<std::int64_t>& radii, const BandStructure& bands, double tol,
                                 FiberKind kind = FiberKind::gauss_bonnet, std::int64_t support_radius = -1,
                                 double location_tolerance = 1e-4);

/// Eigenvalues of a large handle relevant to classification: a few at each end and the
/// ones nearest every gap midpoint, found by shift-invert.
std::vector<double> gap_targeted_eigenvalues(const HermitianMatrixHandle& a, const BandStructure& bands,
                                             std::size_t per_target = 8);

}  // namespace cspec
