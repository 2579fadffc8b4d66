#include "cspec/symbols.hpp"

#include <cmath>

#include "cspec/errors.hpp"

namespace cspec {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

Symbol zero_symbol(std::string name, LatticePoint shift, std::size_t size) {
  return {std::move(name), std::move(shift), size,
          [size](const LatticePoint&) { return MatrixC::Zero(idx(size), idx(size)).eval(); }};
}

}  // namespace

Symbol symbol_dagger(const Symbol& s) {
  Symbol out;
  out.name = s.name + "^dagger";
  out.shift = -s.shift;
  out.size = s.size;
  const LatticePoint nu = s.shift;
  auto inner = s.value;
  out.value = [inner, nu](const LatticePoint& mu) -> MatrixC { return inner(mu + nu).adjoint(); };
  return out;
}

FourierSequence op_apply(const Symbol& s, const FourierSequence& u) {
  FourierSequence out;
  for (const auto& [mu, v] : u) {
    if (static_cast<std::size_t>(v.size()) != s.size) throw ShapeError("coefficient size differs from symbol size");
    VectorC w = s.value(mu) * v;
    auto [it, inserted] = out.emplace(mu - s.shift, w);
    if (!inserted) it->second += w;
  }
  return out;
}

FourierSequence& accumulate(FourierSequence& into, const FourierSequence& add) {
  for (const auto& [mu, v] : add) {
    auto [it, inserted] = into.emplace(mu, v);
    if (!inserted) it->second += v;
  }
  return into;
}

double max_difference(const FourierSequence& a, const FourierSequence& b) {
  double m = 0.0;
  for (const auto& [mu, v] : a) {
    auto it = b.find(mu);
    const VectorC diff = it == b.end() ? v : VectorC(v - it->second);
    if (diff.size()) m = std::max(m, diff.cwiseAbs().maxCoeff());
  }
  for (const auto& [mu, v] : b) {
    if (!a.count(mu) && v.size()) m = std::max(m, v.cwiseAbs().maxCoeff());
  }
  return m;
}

FourierSequence fourier_coefficients(const Crystal& c, const CrystalCochain& f) {
  const std::size_t n = c.vertex_count();
  const auto& d = c.descriptor();
  FourierSequence out;
  auto slot = [&](const LatticePoint& mu) -> VectorC& {
    auto [it, inserted] = out.emplace(mu, VectorC::Zero(idx(c.fiber_dimension())));
    return it->second;
  };
  for (const auto& [key, v] : f.vertex) slot(key.cell)(idx(key.base)) += std::sqrt(d.vertices.at(key.base).measure) * v;
  for (const auto& [key, v] : f.edge) slot(key.cell)(idx(n + key.base)) += std::sqrt(d.edges.at(key.base).measure) * v;
  return out;
}

FourierSequence edge_fourier_coefficients(const Crystal& c, const CrystalCochain& f) {
  const auto& d = c.descriptor();
  FourierSequence out;
  for (const auto& [key, v] : f.edge) {
    auto [it, inserted] = out.emplace(key.cell, VectorC::Zero(idx(c.edge_count())));
    it->second(idx(key.base)) += std::sqrt(d.edges.at(key.base).measure) * v;
  }
  return out;
}

CrystalCochain cochain_from_coefficients(const Crystal& c, const FourierSequence& u) {
  const std::size_t n = c.vertex_count();
  const std::size_t l = c.edge_count();
  const auto& d = c.descriptor();
  CrystalCochain f;
  for (const auto& [mu, v] : u) {
    if (static_cast<std::size_t>(v.size()) == l) {
      for (std::size_t k = 0; k < l; ++k) {
        if (v(idx(k)) != Complex{}) f.edge[{k, mu}] = v(idx(k)) / std::sqrt(d.edges[k].measure);
      }
      continue;
    }
    if (static_cast<std::size_t>(v.size()) != n + l) throw ShapeError("coefficient size matches neither C^{n+l} nor C^l");
    for (std::size_t j = 0; j < n; ++j) {
      if (v(idx(j)) != Complex{}) f.vertex[{j, mu}] = v(idx(j)) / std::sqrt(d.vertices[j].measure);
    }
    for (std::size_t k = 0; k < l; ++k) {
      if (v(idx(n + k)) != Complex{}) f.edge[{k, mu}] = v(idx(n + k)) / std::sqrt(d.edges[k].measure);
    }
  }
  return f;
}

std::vector<const Symbol*> GaussBonnetSymbols::family() const {
  std::vector<const Symbol*> out{&f0};
  for (const auto& e : edges) out.push_back(&e);
  out.push_back(&fs);
  return out;
}

GaussBonnetSymbols build_gb_symbols(const Crystal& c, const ElementField& m, const ElementField& r_s,
                                    const ElementField& r_l, std::size_t anchor) {
  if (anchor >= c.vertex_count()) throw LookupError("anchor vertex " + std::to_string(anchor) + " does not exist");
  const std::size_t n = c.vertex_count();
  const std::size_t l = c.edge_count();
  const std::size_t size = n + l;
  const CrystalDescriptor d = c.descriptor();
  const LatticePoint zero(c.dimension());
  GaussBonnetSymbols s;
  s.anchor = anchor;

  s.f0 = {"b(f0)", zero, size, [d, n, size, &m](const LatticePoint& mu) {
            MatrixC b = MatrixC::Zero(idx(size), idx(size));
            for (std::size_t k = 0; k < d.edges.size(); ++k) {
              const std::size_t j = d.edges[k].from;
              b(idx(j), idx(n + k)) = std::sqrt(d.edges[k].measure / d.vertices[j].measure) -
                                      std::sqrt(m.edge(k, mu) / m.vertex(j, mu));
            }
            return b;
          }};

  for (std::size_t k = 0; k < l; ++k) {
    const LatticePoint eta = d.edges[k].eta;
    s.edges.push_back({"b(e" + std::to_string(k + 1) + ")", -eta, size, [d, n, size, k, eta, &m](const LatticePoint& mu) {
                         MatrixC b = MatrixC::Zero(idx(size), idx(size));
                         const std::size_t t = d.edges[k].to;
                         // (mu + eta) applied to the reversed edge is the reversal of mu e_k.
                         b(idx(t), idx(n + k)) = std::sqrt(m.edge(k, mu) / m.vertex(t, mu + eta)) -
                                                 std::sqrt(d.edges[k].measure / d.vertices[t].measure);
                         return b;
                       }});
  }

  s.fs = {"b(fs)", zero, size, [n, l, size, anchor, &r_s, &r_l](const LatticePoint& mu) {
            MatrixC b = MatrixC::Zero(idx(size), idx(size));
            const double ref = r_l.vertex(anchor, mu);
            for (std::size_t j = 0; j < n; ++j) b(idx(j), idx(j)) = (r_s.vertex(j, mu) + r_l.vertex(j, mu) - ref) / 2.0;
            for (std::size_t k = 0; k < l; ++k) {
              b(idx(n + k), idx(n + k)) = (r_s.edge(k, mu) + r_l.edge(k, mu) - ref) / 2.0;
            }
            return b;
          }};

  s.c = {"c", zero, size, [size, anchor, &r_l](const LatticePoint& mu) {
           return MatrixC(r_l.vertex(anchor, mu) * MatrixC::Identity(idx(size), idx(size)));
         }};
  return s;
}

FourierSequence apply_gb_symbols(const GaussBonnetSymbols& s, const FourierSequence& u) {
  FourierSequence out;
  for (const Symbol* b : s.family()) {
    accumulate(out, op_apply(*b, u));
    accumulate(out, op_apply(symbol_dagger(*b), u));
  }
  accumulate(out, op_apply(s.c, u));
  return out;
}

const Symbol& EdgeSymbols::get(char family, std::size_t j, std::size_t ell) const {
  const std::size_t i = j * edge_count + ell;
  switch (family) {
    case 'a': return a.at(i);
    case 'b': return b.at(i);
    case 'c': return c.at(i);
    case 'd': return d.at(i);
    default: throw LookupError(std::string("unknown edge symbol family '") + family + "'");
  }
}

EdgeSymbols build_edge_symbols(const Crystal& c, const ElementField& m) {
  const std::size_t l = c.edge_count();
  const CrystalDescriptor d = c.descriptor();
  const LatticePoint zero(c.dimension());
  EdgeSymbols s;
  s.edge_count = l;

  auto single = [l](std::size_t row, std::size_t col, double v) {
    MatrixC b = MatrixC::Zero(idx(l), idx(l));
    b(idx(row), idx(col)) = v;
    return b;
  };

  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t ell = 0; ell < l; ++ell) {
      const auto& ej = d.edges[j];
      const auto& el = d.edges[ell];
      const LatticePoint eta_j = ej.eta;
      const LatticePoint eta_l = el.eta;
      const double gamma_pair = std::sqrt(ej.measure * el.measure);
      const std::string tag = "(e" + std::to_string(j + 1) + ",e" + std::to_string(ell + 1) + ")";

      // t(e_j) = t(e_ell): entering through the reversal of e_j at t(e_ell).
      if (ej.to == el.to) {
        const double ref = gamma_pair / d.vertices[el.to].measure;
        s.a.push_back({"a" + tag, eta_l - eta_j, l, [=, &m](const LatticePoint& mu) {
                         const double v = std::sqrt(m.edge(ell, mu - eta_l + eta_j) * m.edge(j, mu)) /
                                              m.vertex(el.to, mu + eta_j) -
                                          ref;
                         return single(ell, j, v);
                       }});
      } else {
        s.a.push_back(zero_symbol("a" + tag, eta_l - eta_j, l));
      }

      // o(e_j) = t(e_ell)
      if (ej.from == el.to) {
        const double ref = gamma_pair / d.vertices[el.to].measure;
        s.b.push_back({"b" + tag, eta_l, l, [=, &m](const LatticePoint& mu) {
                         const double v =
                             ref - std::sqrt(m.edge(ell, mu - eta_l) * m.edge(j, mu)) / m.vertex(el.to, mu);
                         return single(ell, j, v);
                       }});
      } else {
        s.b.push_back(zero_symbol("b" + tag, eta_l, l));
      }

      // t(e_j) = o(e_ell)
      if (ej.to == el.from) {
        const double ref = gamma_pair / d.vertices[el.from].measure;
        s.c.push_back({"c" + tag, -eta_j, l, [=, &m](const LatticePoint& mu) {
                         const double v =
                             ref - std::sqrt(m.edge(ell, mu + eta_j) * m.edge(j, mu)) / m.vertex(el.from, mu + eta_j);
                         return single(ell, j, v);
                       }});
      } else {
        s.c.push_back(zero_symbol("c" + tag, -eta_j, l));
      }

      // o(e_j) = o(e_ell)
      if (ej.from == el.from) {
        const double ref = gamma_pair / d.vertices[el.from].measure;
        s.d.push_back({"d" + tag, zero, l, [=, &m](const LatticePoint& mu) {
                         const double v = std::sqrt(m.edge(j, mu) * m.edge(ell, mu)) / m.vertex(el.from, mu) - ref;
                         return single(ell, j, v);
                       }});
      } else {
        s.d.push_back(zero_symbol("d" + tag, zero, l));
      }
    }
  }
  return s;
}

FourierSequence apply_edge_symbols(const EdgeSymbols& s, const FourierSequence& u) {
  FourierSequence out;
  for (const auto* fam : {&s.a, &s.b, &s.c, &s.d}) {
    for (const auto& sym : *fam) accumulate(out, op_apply(sym, u));
  }
  return out;
}

MatrixC op_matrix(const Symbol& s, int dimension, std::int64_t radius) {
  const auto cells = box_points(dimension, radius);
  const auto k = static_cast<Eigen::Index>(s.size);
  MatrixC out = MatrixC::Zero(static_cast<Eigen::Index>(cells.size()) * k, static_cast<Eigen::Index>(cells.size()) * k);
  for (std::size_t col = 0; col < cells.size(); ++col) {
    const LatticePoint target = cells[col] - s.shift;
    if (target.sup_norm() > radius) continue;
    const auto row = static_cast<Eigen::Index>(box_index(target, radius));
    out.block(row * k, static_cast<Eigen::Index>(col) * k, k, k) = s.value(cells[col]);
  }
  return out;
}

}  // namespace cspec
