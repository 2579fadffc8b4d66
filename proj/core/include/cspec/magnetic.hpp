#pragma once

// Magnetic operators on a finite weighted graph, as matrices in the
// m^{1/2}-normalized basis x_1..x_n, e_1..e_l (positive orientations).
//
// A magnetic 1-cochain satisfies f(e-bar) = -conj(theta(e)) f(e) and is stored
// by its values on the positive orientations.

#include <complex>
#include <span>
#include <vector>

#include "cspec/crystal.hpp"
#include "cspec/graph.hpp"

namespace cspec {

/// Unit-modulus phase per positive base edge; theta(e-bar) = conj(theta(e)).
struct FluxAssignment {
  std::vector<Complex> theta;

  static FluxAssignment trivial(std::size_t edge_count);
  /// theta(e) = exp(2 pi i phase(e)).
  static FluxAssignment from_phases(std::span<const double> phases);
  /// Phase on a base oriented edge (2k or 2k+1).
  Complex on_oriented(std::size_t oriented) const {
    const Complex t = theta.at(oriented >> 1U);
    return (oriented & 1U) ? std::conj(t) : t;
  }
  /// Throws ValidationError when a phase is off the unit circle by more than 1e-12.
  void validate(const OrientedGraph& g) const;
};

/// theta_xi(e) = exp(2 pi i xi . eta(e)).
FluxAssignment bloch_flux(const Crystal& c, std::span<const double> xi);

struct MagneticMatrixSet {
  MatrixC d;            // l x n
  MatrixC d_star;       // n x l
  MatrixC gauss_bonnet; // (n+l) x (n+l), includes the potential
  MatrixC laplacian0;   // n x n, Delta_0(X_theta)
  MatrixC laplacian1;   // l x l, Delta_1(X_theta)
};

/// f -> theta(e) f(t(e)) - f(o(e)), normalized.
MatrixC magnetic_d_matrix(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta);
/// d*_theta from the boundary formula -sum_{e in A_x} m(e)/m(x) f(e) on magnetic cochains, normalized.
MatrixC magnetic_d_star_matrix(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta);
/// [[R|V, d*_theta], [d_theta, R|E]]
MatrixC magnetic_gauss_bonnet_matrix(const OrientedGraph& g, const Measure& m, const Potential& r,
                                     const FluxAssignment& theta);
/// Delta_0(X_theta) f(x) = sum_{e in A_x} m(e)/m(x) (theta(e) f(t(e)) - f(x)), normalized.
MatrixC magnetic_laplacian0_matrix(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta);
/// Delta_1(X_theta), assembled from its two star sums, normalized.
MatrixC magnetic_laplacian1_matrix(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta);

MagneticMatrixSet magnetic_matrices(const OrientedGraph& g, const Measure& m, const Potential& r,
                                    const FluxAssignment& theta);

/// Unnormalized d_theta acting on 0-cochain values.
VectorC apply_magnetic_d(const OrientedGraph& g, const FluxAssignment& theta, const VectorC& f0);
/// Unnormalized d*_theta acting on a magnetic 1-cochain given on positive orientations.
VectorC apply_magnetic_d_star(const OrientedGraph& g, const Measure& m, const FluxAssignment& theta,
                              const VectorC& f1);

}  // namespace cspec
