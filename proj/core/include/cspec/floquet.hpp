#pragma once

// Floquet-Bloch side of a periodic crystal: fibers h0(xi), Bloch transform,
// band structure and threshold estimates.
//
// Fibers act on C^{n+l}, vertices first, in the m^{1/2}-normalized basis.
// The Bloch transform uses u(xi) = sum_mu e^{-2 pi i xi.mu} u_check(mu) with
// u_check(mu)_j = m(x_j)^{1/2} f(mu.x_j).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cspec/crystal.hpp"
#include "cspec/graph.hpp"

namespace cspec {

/// xi in [0,1)^d.
struct TorusPoint {
  std::vector<double> xi;

  TorusPoint() = default;
  /// Components are reduced mod 1.
  explicit TorusPoint(std::vector<double> components);
  int dimension() const noexcept { return static_cast<int>(xi.size()); }
};

/// The uniform grid xi_k = k/N per axis, in lexicographic order of k.
std::vector<TorusPoint> torus_grid(int dimension, std::size_t n);

/// Fiber of the Gauss-Bonnet operator D(X, m_Gamma) + R_Gamma.
MatrixC assemble_h0(const Crystal& c, const TorusPoint& xi);
/// Fiber of -Delta_1(X, m_Gamma) + R_Gamma on edges: B B^* + diag(R_Gamma|E), B the edge-vertex block.
MatrixC assemble_h1_edge(const Crystal& c, const TorusPoint& xi);

VectorC bloch_transform(const Crystal& c, const CrystalCochain& f, const TorusPoint& xi);
/// bloch_transform at every point of torus_grid(d, n).
std::vector<VectorC> bloch_samples(const Crystal& c, const CrystalCochain& f, std::size_t n);
/// Discrete inverse on the N^d grid; recovers cells mu with -floor((N-1)/2) <= mu_i <= floor(N/2).
/// Exact for cochains supported in that window, aliased otherwise.
CrystalCochain inverse_bloch(const Crystal& c, std::span<const VectorC> samples, std::size_t n);

struct BandStructure {
  int dimension = 1;
  std::size_t grid = 0;
  std::size_t band_count = 0;
  std::vector<TorusPoint> points;
  /// eigenvalues[p][b], sorted increasingly for each grid point p.
  std::vector<std::vector<double>> eigenvalues;
  std::vector<double> band_min;
  std::vector<double> band_max;
  std::vector<double> thresholds;

  /// Union of the band intervals, merged and sorted.
  std::vector<std::pair<double, double>> band_union() const;
};

/// Which fiber to diagonalize.
enum class FiberKind { gauss_bonnet, edge_laplacian };

/// Eigenvalues over torus_grid(d, n); n >= 2. Grid points are evaluated in parallel.
BandStructure compute_bands(const Crystal& c, std::size_t n, FiberKind kind = FiberKind::gauss_bonnet);

/// Sorted eigenvalues of one fiber.
std::vector<double> fiber_eigenvalues(const Crystal& c, const TorusPoint& xi,
                                      FiberKind kind = FiberKind::gauss_bonnet);

/// Band endpoints, refined interior critical values and flat-band values,
/// sorted and deduplicated within 1e-6. Also stored into bands.thresholds.
std::vector<double> estimate_thresholds(const Crystal& c, BandStructure& bands, int refinement = 30,
                                        FiberKind kind = FiberKind::gauss_bonnet);

/// Header xi_1..xi_d,band_1..band_k, one row per grid point, 17 significant digits.
std::string bands_to_csv(const BandStructure& bands);
/// Grid size, band intervals, their union and the threshold estimate.
nlohmann::json bands_to_json(const BandStructure& bands);

}  // namespace cspec
