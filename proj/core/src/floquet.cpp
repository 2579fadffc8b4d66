#include "cspec/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cspec/errors.hpp"
#include "cspec/parallel.hpp"

namespace cspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_dimension(const Crystal& c, const TorusPoint& xi) {
  if (xi.dimension() != c.dimension()) {
    throw ShapeError("torus point has dimension " + std::to_string(xi.dimension()) + ", crystal has " +
                     std::to_string(c.dimension()));
  }
}

Complex phase(const LatticePoint& eta, const TorusPoint& xi) {
  return std::polar(1.0, kTwoPi * eta.dot(xi.xi));
}

// Lexicographic multi-index enumeration of {lo..hi}^d.
std::vector<LatticePoint> window_points(int d, std::int64_t lo, std::int64_t hi) {
  std::vector<LatticePoint> out;
  LatticePoint p(d);
  for (int a = 0; a < d; ++a) p[a] = lo;
  if (hi < lo) return out;
  while (true) {
    out.push_back(p);
    int a = d - 1;
    while (a >= 0 && p[a] == hi) {
      p[a] = lo;
      --a;
    }
    if (a < 0) break;
    ++p[a];
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TorusPoint::TorusPoint(std::vector<double> components) : xi(std::move(components)) {
  for (double& x : xi) {
    x -= std::floor(x);
    if (x >= 1.0) x = 0.0;
  }
}

std::vector<TorusPoint> torus_grid(int dimension, std::size_t n) {
  if (n == 0) throw ValidationError("grid", "size must be positive");
  std::vector<TorusPoint> out;
  for (const auto& k : window_points(dimension, 0, static_cast<std::int64_t>(n) - 1)) {
    std::vector<double> xi(static_cast<std::size_t>(dimension));
    for (int a = 0; a < dimension; ++a) xi[static_cast<std::size_t>(a)] = static_cast<double>(k[a]) / static_cast<double>(n);
    TorusPoint t;
    t.xi = std::move(xi);
    out.push_back(std::move(t));
  }
  return out;
}

MatrixC assemble_h0(const Crystal& c, const TorusPoint& xi) {
  check_dimension(c, xi);
  const std::size_t n = c.vertex_count();
  const std::size_t l = c.edge_count();
  const auto& d = c.descriptor();
  MatrixC h = MatrixC::Zero(idx(n + l), idx(n + l));
  for (std::size_t j = 0; j < n; ++j) h(idx(j), idx(j)) = d.vertices[j].potential;
  for (std::size_t k = 0; k < l; ++k) h(idx(n + k), idx(n + k)) = d.edges[k].potential;

  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < l; ++k) {
      const auto& e = d.edges[k];
      const bool at_origin = e.from == j;
      const bool at_terminus = e.to == j;
      if (!at_origin && !at_terminus) continue;
      const double w = std::sqrt(e.measure / d.vertices[j].measure);
      const Complex p = phase(e.eta, xi);
      Complex lower;
      if (at_origin && at_terminus) {
        lower = -1.0 + p;
      } else if (at_origin) {
        lower = -1.0;
      } else {
        lower = p;
      }
      h(idx(n + k), idx(j)) = w * lower;
      h(idx(j), idx(n + k)) = w * std::conj(lower);
    }
  }
  return h;
}

MatrixC assemble_h1_edge(const Crystal& c, const TorusPoint& xi) {
  const std::size_t n = c.vertex_count();
  const std::size_t l = c.edge_count();
  const MatrixC h = assemble_h0(c, xi);
  const MatrixC b = h.block(idx(n), 0, idx(l), idx(n));
  MatrixC out = b * b.adjoint();
  for (std::size_t k = 0; k < l; ++k) out(idx(k), idx(k)) += c.descriptor().edges[k].potential;
  return out;
}

VectorC bloch_transform(const Crystal& c, const CrystalCochain& f, const TorusPoint& xi) {
  check_dimension(c, xi);
  const std::size_t n = c.vertex_count();
  const auto& d = c.descriptor();
  VectorC out = VectorC::Zero(idx(c.fiber_dimension()));
  for (const auto& [key, value] : f.vertex) {
    if (key.base >= n) throw LookupError("cochain references unknown base vertex");
    out(idx(key.base)) += std::sqrt(d.vertices[key.base].measure) * std::polar(1.0, -kTwoPi * key.cell.dot(xi.xi)) * value;
  }
  for (const auto& [key, value] : f.edge) {
    if (key.base >= c.edge_count()) throw LookupError("cochain references unknown base edge");
    out(idx(n + key.base)) +=
        std::sqrt(d.edges[key.base].measure) * std::polar(1.0, -kTwoPi * key.cell.dot(xi.xi)) * value;
  }
  return out;
}

std::vector<VectorC> bloch_samples(const Crystal& c, const CrystalCochain& f, std::size_t n) {
  const auto grid = torus_grid(c.dimension(), n);
  std::vector<VectorC> out(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) out[p] = bloch_transform(c, f, grid[p]);
  return out;
}

CrystalCochain inverse_bloch(const Crystal& c, std::span<const VectorC> samples, std::size_t n) {
  const auto grid = torus_grid(c.dimension(), n);
  if (samples.size() != grid.size()) throw ShapeError("expected one sample per grid point");
  const std::size_t nv = c.vertex_count();
  const std::size_t dim = c.fiber_dimension();
  for (const auto& s : samples) {
    if (static_cast<std::size_t>(s.size()) != dim) throw ShapeError("sample size differs from the fiber dimension");
  }
  const auto& d = c.descriptor();
  const double scale = 1.0 / static_cast<double>(grid.size());
  const auto lo = -static_cast<std::int64_t>((n - 1) / 2);
  const auto hi = static_cast<std::int64_t>(n / 2);

  CrystalCochain out;
  for (const auto& mu : window_points(c.dimension(), lo, hi)) {
    VectorC coeff = VectorC::Zero(idx(dim));
    for (std::size_t p = 0; p < grid.size(); ++p) coeff += std::polar(1.0, kTwoPi * mu.dot(grid[p].xi)) * samples[p];
    coeff *= scale;
    for (std::size_t j = 0; j < dim; ++j) {
      const Complex v = coeff(idx(j));
      if (std::abs(v) < 1e-14) continue;
      if (j < nv) {
        out.vertex[{j, mu}] = v / std::sqrt(d.vertices[j].measure);
      } else {
        out.edge[{j - nv, mu}] = v / std::sqrt(d.edges[j - nv].measure);
      }
    }
  }
  return out;
}

std::vector<double> fiber_eigenvalues(const Crystal& c, const TorusPoint& xi, FiberKind kind) {
  const MatrixC h = kind == FiberKind::gauss_bonnet ? assemble_h0(c, xi) : assemble_h1_edge(c, xi);
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "fiber eigensolver failed at xi = (";
    for (std::size_t a = 0; a < xi.xi.size(); ++a) os << (a ? ", " : "") << format_double(xi.xi[a]);
    os << ")";
    throw NumericError(os.str());
  }
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<std::pair<double, double>> BandStructure::band_union() const {
  std::vector<std::pair<double, double>> iv;
  for (std::size_t b = 0; b < band_min.size(); ++b) iv.emplace_back(band_min[b], band_max[b]);
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& [a, b] : iv) {
    if (!out.empty() && a <= out.back().second) {
      out.back().second = std::max(out.back().second, b);
    } else {
      out.emplace_back(a, b);
    }
  }
  return out;
}

BandStructure compute_bands(const Crystal& c, std::size_t n, FiberKind kind) {
  if (n < 2) throw ValidationError("grid", "band grid needs N >= 2");
  BandStructure bs;
  bs.dimension = c.dimension();
  bs.grid = n;
  bs.band_count = kind == FiberKind::gauss_bonnet ? c.fiber_dimension() : c.edge_count();
  bs.points = torus_grid(c.dimension(), n);
  bs.eigenvalues.resize(bs.points.size());
  parallel_for(bs.points.size(), [&](std::size_t p) { bs.eigenvalues[p] = fiber_eigenvalues(c, bs.points[p], kind); });
  bs.band_min.assign(bs.band_count, std::numeric_limits<double>::infinity());
  bs.band_max.assign(bs.band_count, -std::numeric_limits<double>::infinity());
  for (const auto& ev : bs.eigenvalues) {
    for (std::size_t b = 0; b < bs.band_count; ++b) {
      bs.band_min[b] = std::min(bs.band_min[b], ev[b]);
      bs.band_max[b] = std::max(bs.band_max[b], ev[b]);
    }
  }
  return bs;
}

namespace {

// Offsets {-1,0,1}^d with the zero offset first.
std::vector<LatticePoint> neighborhood(int d) {
  auto pts = window_points(d, -1, 1);
  std::stable_partition(pts.begin(), pts.end(), [](const LatticePoint& p) { return p.is_zero(); });
  return pts;
}

TorusPoint shifted(const TorusPoint& xi, const LatticePoint& offset, double h) {
  std::vector<double> v = xi.xi;
  for (std::size_t a = 0; a < v.size(); ++a) v[a] += h * static_cast<double>(offset[static_cast<int>(a)]);
  return TorusPoint(std::move(v));
}

// Zooms in on a stationary point of band b, starting from a grid point.
double refine_critical_value(const Crystal& c, FiberKind kind, std::size_t band, TorusPoint center, double h,
                             int refinement) {
  const int d = c.dimension();
  const auto offsets = neighborhood(d);
  auto value = [&](const TorusPoint& t) { return fiber_eigenvalues(c, t, kind)[band]; };
  auto grad2 = [&](const TorusPoint& t, double step) {
    double g = 0.0;
    for (int a = 0; a < d; ++a) {
      const auto e = LatticePoint::unit(d, a);
      const double diff = (value(shifted(t, e, step)) - value(shifted(t, -e, step))) / (2.0 * step);
      g += diff * diff;
    }
    return g;
  };
  for (int it = 0; it < refinement; ++it) {
    TorusPoint best = center;
    double best_g = grad2(center, h / 2.0);
    for (std::size_t o = 1; o < offsets.size(); ++o) {
      TorusPoint cand = shifted(center, offsets[o], h);
      const double g = grad2(cand, h / 2.0);
      if (g < best_g) {
        best_g = g;
        best = cand;
      }
    }
    center = best;
    h /= 2.0;
  }
  return value(center);
}

}  // namespace

std::vector<double> estimate_thresholds(const Crystal& c, BandStructure& bands, int refinement, FiberKind kind) {
  const int d = bands.dimension;
  const auto n = static_cast<std::int64_t>(bands.grid);
  std::vector<double> raw;
  auto grid_index = [&](LatticePoint k) {
    std::size_t p = 0;
    for (int a = 0; a < d; ++a) {
      const std::int64_t v = ((k[a] % n) + n) % n;
      p = p * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
    }
    return p;
  };
  const auto cells = window_points(d, 0, n - 1);

  for (std::size_t b = 0; b < bands.band_count; ++b) {
    raw.push_back(bands.band_min[b]);
    raw.push_back(bands.band_max[b]);
    if (bands.band_max[b] - bands.band_min[b] < 1e-9) continue;

    std::vector<double> seen;
    for (std::size_t p = 0; p < cells.size(); ++p) {
      const double v = bands.eigenvalues[p][b];
      bool stationary = true;
      for (int a = 0; a < d && stationary; ++a) {
        const auto e = LatticePoint::unit(d, a);
        const double fwd = bands.eigenvalues[grid_index(cells[p] + e)][b] - v;
        const double bwd = v - bands.eigenvalues[grid_index(cells[p] - e)][b];
        stationary = fwd * bwd <= 0.0;
      }
      if (!stationary) continue;
      if (std::any_of(seen.begin(), seen.end(), [&](double s) { return std::abs(s - v) < 1e-9; })) continue;
      seen.push_back(v);
      raw.push_back(refine_critical_value(c, kind, b, bands.points[p], 1.0 / static_cast<double>(n), refinement));
    }
  }

  std::sort(raw.begin(), raw.end());
  std::vector<double> out;
  for (double v : raw) {
    if (out.empty() || v - out.back() > 1e-6) out.push_back(v);
  }
  bands.thresholds = out;
  return out;
}

std::string bands_to_csv(const BandStructure& bands) {
  std::string s;
  for (int a = 0; a < bands.dimension; ++a) s += (a ? ",xi_" : "xi_") + std::to_string(a + 1);
  for (std::size_t b = 0; b < bands.band_count; ++b) s += ",band_" + std::to_string(b + 1);
  s += '\n';
  for (std::size_t p = 0; p < bands.points.size(); ++p) {
    for (std::size_t a = 0; a < bands.points[p].xi.size(); ++a) {
      if (a) s += ',';
      s += format_double(bands.points[p].xi[a]);
    }
    for (double v : bands.eigenvalues[p]) s += ',' + format_double(v);
    s += '\n';
  }
  return s;
}

nlohmann::json bands_to_json(const BandStructure& bands) {
  nlohmann::json j;
  j["dimension"] = bands.dimension;
  j["grid"] = bands.grid;
  j["band_count"] = bands.band_count;
  nlohmann::json iv = nlohmann::json::array();
  for (std::size_t b = 0; b < bands.band_count; ++b) iv.push_back({bands.band_min[b], bands.band_max[b]});
  j["bands"] = iv;
  nlohmann::json un = nlohmann::json::array();
  for (const auto& [a, b] : bands.band_union()) un.push_back({a, b});
  j["band_union"] = un;
  j["thresholds"] = bands.thresholds;
  return j;
}

}  // namespace cspec
