#pragma once

// Heuristic classification of decay conditions on sequences over Z^d.
//
// The integrability conditions over lambda are replaced by the equivalent dyadic sums
//   short:  sum_{lambda = 1, 2, 4, ...} lambda * sup_{lambda <= |mu| < 2 lambda} |b(mu)|
//   long:   the same with max_j |b(mu + delta_j) - b(mu)|
// and the series is judged by the ratios of its last terms. Numerics cannot decide
// convergence; the verdict is a diagnostic, and the trace is kept for inspection.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspec/lattice.hpp"
#include "cspec/perturbation.hpp"
#include "cspec/symbols.hpp"

namespace cspec {

enum class DecayCondition { short_range, long_range };
enum class DecayVerdict { converging, diverging, inconclusive };

std::string to_string(DecayCondition c);
std::string to_string(DecayVerdict v);

/// Real scalar profile mu -> b(mu).
using ScalarProfile = std::function<double(const LatticePoint&)>;
/// Radial profile r -> g(r) with b(mu) = g(|mu|_inf).
using RadialProfile = std::function<double(std::int64_t)>;

struct DyadicTerm {
  std::int64_t lambda = 0;
  double sup = 0.0;   // shell supremum of |b| (short) or of the differences (long)
  double term = 0.0;  // lambda * sup
  double partial_sum = 0.0;
  bool sampled = false;  // shell too large to scan exhaustively
};

struct DecayOptions {
  /// Ratio test on the median of the last `window` ratios.
  std::size_t window = 4;
  double converging_ratio = 0.9;
  double diverging_ratio = 0.98;
  /// Largest shell scanned point by point; larger shells use a seeded sample plus the axes.
  std::size_t shell_cap = std::size_t{1} << 20;
  std::uint64_t seed = 0x5eed;
};

struct DecayReport {
  DecayCondition condition = DecayCondition::short_range;
  DecayVerdict verdict = DecayVerdict::inconclusive;
  std::int64_t lambda_max = 0;
  std::vector<DyadicTerm> trace;
  /// Ratios of consecutive nonzero terms.
  std::vector<double> ratios;
  double median_ratio = 0.0;
  /// Long condition: sup of |b| on the outer shells, and the note attached when it does not vanish.
  double tail_sup = 0.0;
  std::string note;

  nlohmann::json to_json() const;
};

/// Scans dyadic shells up to lambda_max inclusive, so b is evaluated up to |mu| = 2 lambda_max
/// (plus one step for differences). Throws InsufficientDataError when lambda_max < 4.
DecayReport decay_report(const ScalarProfile& b, int dimension, DecayCondition condition, std::int64_t lambda_max,
                         const DecayOptions& options = {});
/// Fast path for radial profiles; the shell suprema are exact and independent of d.
DecayReport decay_report(const RadialProfile& g, DecayCondition condition, std::int64_t lambda_max,
                         const DecayOptions& options = {});
/// Matrix symbols, measured in operator norm; the long condition differences the matrices.
DecayReport decay_report(const Symbol& b, int dimension, DecayCondition condition, std::int64_t lambda_max,
                         const DecayOptions& options = {});

/// mu -> max over base elements of path_telescope from `anchor`; bounds the entries of b(f_s).
ScalarProfile telescope_profile(const Crystal& c, const ElementField& r_l, std::size_t anchor);

}  // namespace cspec
