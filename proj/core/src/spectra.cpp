#include "cspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "cspec/errors.hpp"
#include "cspec/parallel.hpp"

namespace cspec {

HermitianMatrixHandle::HermitianMatrixHandle(SparseC matrix) {
  if (matrix.rows() != matrix.cols()) throw ShapeError("Hermitian handle needs a square matrix");
  const SparseC adj = matrix.adjoint();
  const SparseC diff = matrix - adj;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseC::InnerIterator it(diff, k); it; ++it) defect_ = std::max(defect_, std::abs(it.value()));
  }
  sparse_ = (0.5 * (matrix + adj)).pruned();
  sparse_.makeCompressed();
  std::vector<double> col(static_cast<std::size_t>(sparse_.cols()), 0.0);
  for (Eigen::Index k = 0; k < sparse_.outerSize(); ++k) {
    for (SparseC::InnerIterator it(sparse_, k); it; ++it) {
      if (it.value().imag() != 0.0) real_ = false;
      col[static_cast<std::size_t>(k)] += std::abs(it.value());
    }
  }
  for (double s : col) norm_bound_ = std::max(norm_bound_, s);
}

Complex HermitianMatrixHandle::entry(std::size_t i, std::size_t j) const {
  if (i >= dimension() || j >= dimension()) throw LookupError("matrix entry out of range");
  return sparse_.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

HermitianMatrixHandle assemble_truncated(const Crystal& c, const ElementField& m, const ElementField& r,
                                         std::int64_t radius, FiberKind kind, std::int64_t support_radius) {
  if (radius < 1) throw ValidationError("radius", "must be at least 1");
  const Truncation t = truncate(c, radius, m, r);
  SparseC a;
  if (kind == FiberKind::gauss_bonnet) {
    a = normalized_gauss_bonnet_matrix(t.graph, t.measure, t.potential);
  } else {
    const SparseC d = normalized_d_matrix(t.graph, t.measure);
    a = d * SparseC(d.adjoint());
    for (std::size_t k = 0; k < t.edges.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      a.coeffRef(i, i) += t.potential.edge[k];
    }
  }
  HermitianMatrixHandle h(std::move(a));
  h.radius = radius;
  h.radius_warning = support_radius >= 0 && support_radius + c.max_eta_norm() > radius;
  return h;
}

namespace {

using LinearOp = std::function<VectorC(const VectorC&)>;

enum class Select { smallest, largest, largest_magnitude };

struct RitzPairs {
  std::vector<double> values;  // in selection order
  MatrixC vectors;
  std::size_t dimension = 0;
};

VectorC random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  VectorC v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(g(rng), 0.0);
  return v;
}

void orthogonalize(VectorC& w, const std::vector<VectorC>& q) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& qi : q) w -= qi.dot(w) * qi;
  }
}

std::vector<std::size_t> select(const Eigen::VectorXd& theta, std::size_t k, Select how) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(theta.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto key = [&](std::size_t i) {
    const double t = theta(static_cast<Eigen::Index>(i));
    switch (how) {
      case Select::smallest:
        return t;
      case Select::largest:
        return -t;
      case Select::largest_magnitude:
        break;
    }
    return -std::abs(t);
  };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  idx.resize(std::min(k, idx.size()));
  return idx;
}

// Lanczos with full reorthogonalization. Grows the Krylov space until the k wanted Ritz pairs
// pass `accept` (or the space is the whole of C^n). Breakdowns restart with a fresh vector
// orthogonal to the basis, so the tridiagonal matrix becomes block diagonal.
RitzPairs lanczos(const LinearOp& op, std::size_t n, std::size_t k, Select how, double op_scale, std::uint64_t seed,
                  const std::function<bool(const RitzPairs&)>& accept) {
  std::mt19937_64 rng(seed);
  std::vector<VectorC> q;
  std::vector<double> alpha;
  std::vector<double> beta;
  VectorC v = random_vector(rng, n);
  v.normalize();
  q.push_back(v);
  std::size_t next_check = std::min(n, std::max<std::size_t>(2 * k + 20, 40));
  while (true) {
    const std::size_t j = q.size() - 1;
    VectorC w = op(q[j]);
    alpha.push_back(q[j].dot(w).real());
    orthogonalize(w, q);
    double b = w.norm();
    const std::size_t m = q.size();
    if (m == next_check || m == n) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(m));
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(m - 1)))
                                  : Eigen::VectorXd();
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const auto wanted = select(tri.eigenvalues(), k, how);
      bool converged = m == n;
      if (!converged) {
        converged = true;
        for (std::size_t i : wanted) {
          const double est = b * std::abs(tri.eigenvectors()(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(i)));
          if (est > 1e-12 * op_scale) converged = false;
        }
      }
      if (converged) {
        RitzPairs out;
        out.dimension = m;
        out.vectors = MatrixC::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(wanted.size()));
        for (std::size_t c = 0; c < wanted.size(); ++c) {
          out.values.push_back(tri.eigenvalues()(static_cast<Eigen::Index>(wanted[c])));
          VectorC x = VectorC::Zero(static_cast<Eigen::Index>(n));
          for (std::size_t r = 0; r < m; ++r) {
            x += tri.eigenvectors()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(wanted[c])) * q[r];
          }
          out.vectors.col(static_cast<Eigen::Index>(c)) = x.normalized();
        }
        if (m == n || accept(out)) return out;
      }
      next_check = std::min(n, m + std::max<std::size_t>(10, m / 4));
    }
    if (m == n) throw NumericError("Lanczos exhausted the space without meeting the residual bound");
    if (b <= 1e-10 * op_scale) {
      w = random_vector(rng, n);
      orthogonalize(w, q);
      w.normalize();
      b = 0.0;
      q.push_back(w);
    } else {
      q.push_back(w / b);
    }
    beta.push_back(b);
  }
}

double max_residual(const SparseC& a, const std::vector<double>& values, const MatrixC& vectors) {
  double r = 0.0;
  for (std::size_t c = 0; c < values.size(); ++c) {
    const VectorC v = vectors.col(static_cast<Eigen::Index>(c));
    r = std::max(r, (a * v - values[c] * v).norm());
  }
  return r;
}

void check_residual(const HermitianMatrixHandle& a, double residual, const std::string& method) {
  const double bound = 1e-9 * std::max(a.norm_bound(), 1e-300);
  if (residual > bound) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s eigenpair residual %.3e exceeds %.3e (dimension %zu)", method.c_str(), residual,
                  bound, a.dimension());
    throw NumericError(buf);
  }
}

void sort_pairs(EigenResult& res) {
  std::vector<std::size_t> idx(res.values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return res.values[a] < res.values[b]; });
  std::vector<double> vals;
  MatrixC vecs(res.vectors.rows(), res.vectors.cols());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    vals.push_back(res.values[idx[c]]);
    if (res.vectors.cols() > 0) vecs.col(static_cast<Eigen::Index>(c)) = res.vectors.col(static_cast<Eigen::Index>(idx[c]));
  }
  res.values = std::move(vals);
  res.vectors = std::move(vecs);
}

EigenResult dense_solve(const HermitianMatrixHandle& a, const EigenRequest& req) {
  EigenResult res;
  res.method = "dense";
  const auto opts = req.vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  Eigen::VectorXd values;
  MatrixC vectors;
  if (a.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(MatrixC(a.sparse()).real(), opts);
    if (es.info() != Eigen::Success) throw NumericError("dense eigensolver did not converge");
    values = es.eigenvalues();
    if (req.vectors) vectors = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixC> es(a.dense(), opts);
    if (es.info() != Eigen::Success) throw NumericError("dense eigensolver did not converge");
    values = es.eigenvalues();
    if (req.vectors) vectors = es.eigenvectors();
  }
  std::vector<std::size_t> keep;
  const auto n = static_cast<std::size_t>(values.size());
  const std::size_t k = std::min(req.count, n);
  switch (req.which) {
    case EigenRequest::Which::all:
      for (std::size_t i = 0; i < n; ++i) keep.push_back(i);
      break;
    case EigenRequest::Which::smallest:
      for (std::size_t i = 0; i < k; ++i) keep.push_back(i);
      break;
    case EigenRequest::Which::largest:
      for (std::size_t i = n - k; i < n; ++i) keep.push_back(i);
      break;
    case EigenRequest::Which::nearest: {
      std::vector<std::size_t> idx(n);
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(values(static_cast<Eigen::Index>(x)) - req.shift) <
               std::abs(values(static_cast<Eigen::Index>(y)) - req.shift);
      });
      keep.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(keep.begin(), keep.end());
      break;
    }
  }
  for (std::size_t i : keep) res.values.push_back(values(static_cast<Eigen::Index>(i)));
  if (req.vectors) {
    res.vectors.resize(vectors.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
      res.vectors.col(static_cast<Eigen::Index>(c)) = vectors.col(static_cast<Eigen::Index>(keep[c]));
    }
    res.max_residual = max_residual(a.sparse(), res.values, res.vectors);
    check_residual(a, res.max_residual, res.method);
  }
  return res;
}

EigenResult lanczos_solve(const HermitianMatrixHandle& a, const EigenRequest& req) {
  const std::size_t n = a.dimension();
  const std::size_t k = std::min(req.count, n);
  EigenResult res;
  if (k == 0) return res;
  const double scale = std::max(a.norm_bound(), 1e-300);
  const double bound = 1e-9 * scale;
  const SparseC& mat = a.sparse();

  if (req.which == EigenRequest::Which::nearest) {
    res.method = "shift-invert";
    SparseC id(mat.rows(), mat.cols());
    id.setIdentity();
    Eigen::SparseLU<SparseC> lu;
    double sigma = req.shift;
    bool factored = false;
    for (int attempt = 0; attempt < 4 && !factored; ++attempt) {
      SparseC shifted = mat - Complex(sigma, 0.0) * id;
      shifted.makeCompressed();
      lu.compute(shifted);
      factored = lu.info() == Eigen::Success;
      if (!factored) sigma += 1e-8 * std::max(1.0, scale) * (attempt + 1);
    }
    if (!factored) throw NumericError("sparse LU failed for shift " + std::to_string(req.shift));
    auto to_eigen = [&](const RitzPairs& p) {
      std::vector<double> vals;
      for (std::size_t c = 0; c < p.values.size(); ++c) {
        // Rayleigh quotient on A is more accurate than sigma + 1/theta.
        const VectorC v = p.vectors.col(static_cast<Eigen::Index>(c));
        vals.push_back(v.dot(mat * v).real());
      }
      return vals;
    };
    const LinearOp op = [&](const VectorC& x) { return VectorC(lu.solve(x)); };
    // The inverse is bounded by 1 / dist(sigma, spectrum); scale with a cheap probe.
    std::mt19937_64 probe_rng(req.seed ^ 0xabcdefULL);
    VectorC probe = random_vector(probe_rng, n);
    probe.normalize();
    const double inv_scale = std::max(op(probe).norm(), 1.0);
    const RitzPairs p = lanczos(op, n, k, Select::largest_magnitude, inv_scale, req.seed, [&](const RitzPairs& r) {
      return max_residual(mat, to_eigen(r), r.vectors) <= 0.1 * bound;
    });
    res.values = to_eigen(p);
    res.vectors = p.vectors;
    res.krylov_dimension = p.dimension;
  } else {
    res.method = "lanczos";
    const LinearOp op = [&](const VectorC& x) { return VectorC(mat * x); };
    const Select how = req.which == EigenRequest::Which::smallest ? Select::smallest : Select::largest;
    const RitzPairs p = lanczos(op, n, k, how, scale, req.seed, [&](const RitzPairs& r) {
      return max_residual(mat, r.values, r.vectors) <= 0.1 * bound;
    });
    res.values = p.values;
    res.vectors = p.vectors;
    res.krylov_dimension = p.dimension;
  }
  res.max_residual = max_residual(mat, res.values, res.vectors);
  check_residual(a, res.max_residual, res.method);
  sort_pairs(res);
  if (!req.vectors) res.vectors.resize(0, 0);
  return res;
}

}  // namespace

EigenResult eigensolve(const HermitianMatrixHandle& a, const EigenRequest& req) {
  const bool dense = req.method == EigenRequest::Method::dense ||
                     (req.method == EigenRequest::Method::automatic &&
                      (a.storage() == HermitianMatrixHandle::Storage::dense || req.which == EigenRequest::Which::all));
  if (dense) return dense_solve(a, req);
  if (req.which == EigenRequest::Which::all) {
    EigenRequest full = req;
    full.which = EigenRequest::Which::smallest;
    full.count = a.dimension();
    return lanczos_solve(a, full);
  }
  return lanczos_solve(a, req);
}

std::vector<double> eigensolve_values(const HermitianMatrixHandle& a) { return eigensolve(a).values; }

std::string to_string(SpectralLabel l) {
  switch (l) {
    case SpectralLabel::inside:
      return "inside";
    case SpectralLabel::gap:
      return "gap";
    case SpectralLabel::near_threshold:
      break;
  }
  return "near_threshold";
}

SpectrumReport classify_spectrum(const std::vector<double>& eigenvalues, const BandStructure& bands, double tol) {
  SpectrumReport rep;
  rep.tolerance = tol;
  rep.eigenvalues = eigenvalues;
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  const auto uni = bands.band_union();
  std::vector<double> marks = bands.thresholds;
  marks.insert(marks.end(), bands.band_min.begin(), bands.band_min.end());
  marks.insert(marks.end(), bands.band_max.begin(), bands.band_max.end());
  for (const auto& [lo, hi] : uni) {
    marks.push_back(lo);
    marks.push_back(hi);
  }

  const double inf = std::numeric_limits<double>::infinity();
  double prev = -inf;
  for (const auto& [lo, hi] : uni) {
    rep.gaps.push_back({prev, lo, 0});
    prev = hi;
  }
  rep.gaps.push_back({prev, inf, 0});

  std::vector<double> in_gap;
  for (double x : rep.eigenvalues) {
    SpectralLabel label = SpectralLabel::gap;
    if (std::any_of(marks.begin(), marks.end(), [&](double t) { return std::abs(x - t) <= tol; })) {
      label = SpectralLabel::near_threshold;
      ++rep.near_threshold_count;
    } else if (std::any_of(uni.begin(), uni.end(), [&](const auto& iv) { return iv.first <= x && x <= iv.second; })) {
      label = SpectralLabel::inside;
      ++rep.inside_count;
    } else {
      ++rep.gap_count;
      in_gap.push_back(x);
      for (auto& g : rep.gaps) {
        if (g.lower < x && x < g.upper) ++g.count;
      }
    }
    rep.labels.push_back(label);
  }
  for (std::size_t i = 0; i < in_gap.size();) {
    std::size_t j = i + 1;
    double sum = in_gap[i];
    while (j < in_gap.size() && in_gap[j] - in_gap[j - 1] <= tol) sum += in_gap[j++];
    rep.gap_eigenvalues.push_back({sum / static_cast<double>(j - i), j - i});
    i = j;
  }
  return rep;
}

namespace {

nlohmann::json bound_json(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json SpectrumReport::to_json() const {
  nlohmann::json labels_json = nlohmann::json::array();
  for (auto l : labels) labels_json.push_back(to_string(l));
  nlohmann::json gaps_json = nlohmann::json::array();
  for (const auto& g : gaps) gaps_json.push_back({{"lower", bound_json(g.lower)}, {"upper", bound_json(g.upper)}, {"count", g.count}});
  nlohmann::json gap_eigs = nlohmann::json::array();
  for (const auto& g : gap_eigenvalues) gap_eigs.push_back({{"value", g.value}, {"multiplicity", g.multiplicity}});
  return {{"radius", radius},
          {"tolerance", tolerance},
          {"eigenvalue_count", eigenvalues.size()},
          {"inside_count", inside_count},
          {"gap_count", gap_count},
          {"near_threshold_count", near_threshold_count},
          {"radius_warning", radius_warning},
          {"gaps", gaps_json},
          {"gap_eigenvalues", gap_eigs},
          {"eigenvalues", eigenvalues},
          {"labels", labels_json}};
}

nlohmann::json StabilityScan::to_json() const {
  nlohmann::json radii = nlohmann::json::array();
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : reports) {
    radii.push_back(r.radius);
    reps.push_back(r.to_json());
  }
  return {{"radii", radii},
          {"verdict", verdict()},
          {"drift", drift},
          {"location_tolerance", location_tolerance},
          {"reports", reps}};
}

std::vector<double> gap_targeted_eigenvalues(const HermitianMatrixHandle& a, const BandStructure& bands,
                                             std::size_t per_target) {
  std::vector<EigenRequest> targets;
  EigenRequest lo;
  lo.which = EigenRequest::Which::smallest;
  lo.count = per_target;
  lo.method = EigenRequest::Method::lanczos;
  targets.push_back(lo);
  EigenRequest hi = lo;
  hi.which = EigenRequest::Which::largest;
  targets.push_back(hi);
  const auto uni = bands.band_union();
  for (std::size_t i = 0; i + 1 < uni.size(); ++i) {
    EigenRequest mid = lo;
    mid.which = EigenRequest::Which::nearest;
    mid.shift = 0.5 * (uni[i].second + uni[i + 1].first);
    targets.push_back(mid);
  }
  std::vector<std::vector<double>> found(targets.size());
  parallel_for(targets.size(), [&](std::size_t t) { found[t] = eigensolve(a, targets[t]).values; });
  std::vector<double> out;
  for (const auto& list : found) {
    std::vector<double> add;
    for (double x : list) {
      if (std::none_of(out.begin(), out.end(), [&](double y) { return std::abs(x - y) <= 1e-9; })) add.push_back(x);
    }
    out.insert(out.end(), add.begin(), add.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

StabilityScan gap_stability_scan(const Crystal& c, const ElementField& m, const ElementField& r,
                                 const std::vector<std::int64_t>& radii, const BandStructure& bands, double tol,
                                 FiberKind kind, std::int64_t support_radius, double location_tolerance) {
  if (radii.size() < 2) throw ValidationError("radii", "stability scan needs at least two radii");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (radii[i] <= radii[i - 1]) throw ValidationError("radii", "must be strictly increasing");
  }
  StabilityScan scan;
  scan.location_tolerance = location_tolerance;
  scan.reports.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    const auto h = assemble_truncated(c, m, r, radii[i], kind, support_radius);
    const auto values = h.storage() == HermitianMatrixHandle::Storage::dense ? eigensolve_values(h)
                                                                             : gap_targeted_eigenvalues(h, bands);
    SpectrumReport rep = classify_spectrum(values, bands, tol);
    rep.radius = radii[i];
    rep.radius_warning = h.radius_warning;
    scan.reports[i] = std::move(rep);
  });
  const auto& a = scan.reports[radii.size() - 2];
  const auto& b = scan.reports[radii.size() - 1];
  std::vector<double> ga;
  std::vector<double> gb;
  for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
    if (a.labels[i] == SpectralLabel::gap) ga.push_back(a.eigenvalues[i]);
  for (std::size_t i = 0; i < b.eigenvalues.size(); ++i)
    if (b.labels[i] == SpectralLabel::gap) gb.push_back(b.eigenvalues[i]);
  if (ga.size() == gb.size()) {
    scan.drift = 0.0;
    for (std::size_t i = 0; i < ga.size(); ++i) scan.drift = std::max(scan.drift, std::abs(ga[i] - gb[i]));
    scan.stable = scan.drift <= location_tolerance;
  }
  return scan;
}

}  // namespace cspec
