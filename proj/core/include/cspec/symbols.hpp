#pragma once

// Symbols b_nu of toroidal pseudo-difference operators and the symbol families
// decomposing H - H_0 (Gauss-Bonnet) and the edge-Laplacian difference.
//
// Op(b_nu) acts on Fourier coefficients by (Op(b_nu) u)^(mu) = b(mu + nu) u^(mu + nu).
// Built symbols evaluate lazily and keep references to the measure and potential fields.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cspec/crystal.hpp"
#include "cspec/graph.hpp"
#include "cspec/perturbation.hpp"

namespace cspec {

/// Finitely supported mu -> C^k.
using FourierSequence = std::map<LatticePoint, VectorC>;

struct Symbol {
  std::string name;
  LatticePoint shift;
  std::size_t size = 0;
  std::function<MatrixC(const LatticePoint&)> value;

  MatrixC operator()(const LatticePoint& mu) const { return value(mu); }
};

/// Shift -nu and sequence mu -> b(mu + nu)^*.
Symbol symbol_dagger(const Symbol& s);
FourierSequence op_apply(const Symbol& s, const FourierSequence& u);

/// Sum of two sequences, entries added where supports overlap.
FourierSequence& accumulate(FourierSequence& into, const FourierSequence& add);
/// max over mu of |a(mu) - b(mu)|_inf, missing entries read as zero.
double max_difference(const FourierSequence& a, const FourierSequence& b);

/// Coefficients of I U f: u^(mu)_j = m_Gamma(x_j)^{1/2} f(mu x_j), then edges.
FourierSequence fourier_coefficients(const Crystal& c, const CrystalCochain& f);
/// Edge part only, in C^l.
FourierSequence edge_fourier_coefficients(const Crystal& c, const CrystalCochain& f);
CrystalCochain cochain_from_coefficients(const Crystal& c, const FourierSequence& u);

struct GaussBonnetSymbols {
  Symbol f0;
  std::vector<Symbol> edges;  // one per base edge, shift -eta(e)
  Symbol fs;
  Symbol c;  // c(mu) I
  std::size_t anchor = 0;

  /// b(f0), b(e_1..e_l), b(f_s), in that order.
  std::vector<const Symbol*> family() const;
};

/// Symbols of I U (H - H_0) U^* I^* with m the perturbed measure and R - R_Gamma = R_S + R_L.
/// `anchor` is the reference vertex of b(f_s) and c.
GaussBonnetSymbols build_gb_symbols(const Crystal& c, const ElementField& m, const ElementField& r_s,
                                    const ElementField& r_l, std::size_t anchor = 0);
/// sum_f [Op(b_f) + Op(b_f^dagger)] + Op(c I) applied to u.
FourierSequence apply_gb_symbols(const GaussBonnetSymbols& s, const FourierSequence& u);

struct EdgeSymbols {
  /// Indexed [j * l + ell] for the pair (e_j, e_ell); single entry at row ell, column j.
  std::vector<Symbol> a, b, c, d;
  std::size_t edge_count = 0;

  const Symbol& get(char family, std::size_t j, std::size_t ell) const;
};

/// Symbols of I U (Delta_1(X, m_Gamma) - J Delta_1(X, m) J^*) U^* I^* on C^l.
EdgeSymbols build_edge_symbols(const Crystal& c, const ElementField& m);
/// sum over pairs of Op(a) + Op(b) + Op(c) + Op(d) applied to u.
FourierSequence apply_edge_symbols(const EdgeSymbols& s, const FourierSequence& u);

/// Matrix of op_apply(s) on the coefficient window {|mu| <= radius} (block-lex order);
/// output entries leaving the window are dropped.
MatrixC op_matrix(const Symbol& s, int dimension, std::int64_t radius);

}  // namespace cspec
