#include "cspec/decay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/SVD>

#include "cspec/errors.hpp"
#include "cspec/parallel.hpp"

namespace cspec {

namespace {

using PointValue = std::function<double(const LatticePoint&)>;

struct Shell {
  double sup = 0.0;
  bool sampled = false;
};

double power(std::int64_t base, int exponent) {
  double r = 1.0;
  for (int i = 0; i < exponent; ++i) r *= static_cast<double>(base);
  return r;
}

// sup of value over lambda <= |mu|_inf < 2 lambda.
Shell scan_shell(const PointValue& value, int d, std::int64_t lambda, const DecayOptions& opt) {
  const std::int64_t outer = 2 * lambda - 1;
  const double count = power(2 * outer + 1, d) - power(2 * lambda - 1, d);
  Shell s;
  if (count <= static_cast<double>(opt.shell_cap)) {
    LatticePoint mu(d);
    for (int i = 0; i < d; ++i) mu[i] = -outer;
    while (true) {
      if (mu.sup_norm() >= lambda) s.sup = std::max(s.sup, value(mu));
      int i = 0;
      for (; i < d; ++i) {
        if (mu[i] < outer) {
          ++mu[i];
          break;
        }
        mu[i] = -outer;
      }
      if (i == d) break;
    }
    return s;
  }
  s.sampled = true;
  std::mt19937_64 rng(opt.seed ^ static_cast<std::uint64_t>(lambda) * 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::int64_t> radius(lambda, outer);
  std::uniform_int_distribution<int> axis(0, d - 1);
  for (std::size_t k = 0; k < opt.shell_cap; ++k) {
    const std::int64_t r = radius(rng);
    const int a = axis(rng);
    std::uniform_int_distribution<std::int64_t> free(-r, r);
    LatticePoint mu(d);
    for (int i = 0; i < d; ++i) mu[i] = free(rng);
    mu[a] = (rng() & 1U) ? r : -r;
    s.sup = std::max(s.sup, value(mu));
  }
  for (std::int64_t r = lambda; r <= outer; ++r) {
    for (int a = 0; a < d; ++a) {
      for (std::int64_t sign : {-1, 1}) {
        LatticePoint mu(d);
        mu[a] = sign * r;
        s.sup = std::max(s.sup, value(mu));
      }
    }
    LatticePoint diag(d);
    for (int i = 0; i < d; ++i) diag[i] = r;
    s.sup = std::max(s.sup, value(diag));
    s.sup = std::max(s.sup, value(-diag));
  }
  return s;
}

std::vector<std::int64_t> dyadic_lambdas(std::int64_t lambda_max) {
  if (lambda_max < 4) throw InsufficientDataError("decay scan needs lambda_max >= 4, got " + std::to_string(lambda_max));
  std::vector<std::int64_t> out;
  for (std::int64_t l = 1; l <= lambda_max; l *= 2) out.push_back(l);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void classify(DecayReport& rep, const DecayOptions& opt) {
  double partial = 0.0;
  for (auto& t : rep.trace) {
    t.term = static_cast<double>(t.lambda) * t.sup;
    partial += t.term;
    t.partial_sum = partial;
  }
  for (std::size_t k = 1; k < rep.trace.size(); ++k) {
    if (rep.trace[k - 1].term > 0.0) rep.ratios.push_back(rep.trace[k].term / rep.trace[k - 1].term);
  }
  const double last = rep.trace.back().term;
  if (last == 0.0) {
    // Identically zero from some shell on: the series is a finite sum.
    rep.verdict = DecayVerdict::converging;
    return;
  }
  if (rep.ratios.size() < 2) {
    rep.verdict = DecayVerdict::inconclusive;
    return;
  }
  const std::size_t w = std::min(opt.window, rep.ratios.size());
  rep.median_ratio = median(std::vector<double>(rep.ratios.end() - static_cast<std::ptrdiff_t>(w), rep.ratios.end()));
  if (rep.median_ratio <= opt.converging_ratio)
    rep.verdict = DecayVerdict::converging;
  else if (rep.median_ratio >= opt.diverging_ratio)
    rep.verdict = DecayVerdict::diverging;
  else
    rep.verdict = DecayVerdict::inconclusive;
}

// Long condition: the differences may be summable while b itself tends to a constant.
void tail_note(DecayReport& rep, double previous_sup, double last_sup, const DecayOptions& opt) {
  rep.tail_sup = last_sup;
  if (last_sup > 0.0 && previous_sup > 0.0 && last_sup / previous_sup >= opt.diverging_ratio) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "sup |b| does not decay (tail %.6g); nonzero limit absorbable into periodic potential", last_sup);
    rep.note = buf;
  }
}

DecayReport scan(const PointValue& magnitude, const PointValue& difference, int d, DecayCondition condition,
                 std::int64_t lambda_max, const DecayOptions& opt) {
  const auto lambdas = dyadic_lambdas(lambda_max);
  if (d < 1) throw ValidationError("dimension", "must be at least 1");
  DecayReport rep;
  rep.condition = condition;
  rep.lambda_max = lambda_max;
  rep.trace.resize(lambdas.size());
  const PointValue& value = condition == DecayCondition::short_range ? magnitude : difference;
  parallel_for(lambdas.size(), [&](std::size_t k) {
    const Shell s = scan_shell(value, d, lambdas[k], opt);
    rep.trace[k].lambda = lambdas[k];
    rep.trace[k].sup = s.sup;
    rep.trace[k].sampled = s.sampled;
  });
  classify(rep, opt);
  if (condition == DecayCondition::long_range) {
    const std::size_t n = lambdas.size();
    tail_note(rep, scan_shell(magnitude, d, lambdas[n - 2], opt).sup, scan_shell(magnitude, d, lambdas[n - 1], opt).sup,
              opt);
  }
  return rep;
}

double operator_norm(const MatrixC& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixC> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

std::string to_string(DecayCondition c) { return c == DecayCondition::short_range ? "short" : "long"; }

std::string to_string(DecayVerdict v) {
  switch (v) {
    case DecayVerdict::converging:
      return "converging";
    case DecayVerdict::diverging:
      return "diverging";
    case DecayVerdict::inconclusive:
      break;
  }
  return "inconclusive";
}

nlohmann::json DecayReport::to_json() const {
  nlohmann::json trace_json = nlohmann::json::array();
  for (const auto& t : trace) {
    trace_json.push_back({{"lambda", t.lambda},
                          {"sup", t.sup},
                          {"term", t.term},
                          {"partial_sum", t.partial_sum},
                          {"sampled", t.sampled}});
  }
  nlohmann::json j = {{"condition", to_string(condition)},
                      {"verdict", to_string(verdict)},
                      {"lambda_max", lambda_max},
                      {"median_ratio", median_ratio},
                      {"ratios", ratios},
                      {"trace", trace_json}};
  if (condition == DecayCondition::long_range) j["tail_sup"] = tail_sup;
  if (!note.empty()) j["note"] = note;
  return j;
}

DecayReport decay_report(const ScalarProfile& b, int dimension, DecayCondition condition, std::int64_t lambda_max,
                         const DecayOptions& options) {
  const PointValue magnitude = [&](const LatticePoint& mu) { return std::abs(b(mu)); };
  const PointValue difference = [&](const LatticePoint& mu) {
    const double here = b(mu);
    double m = 0.0;
    for (int j = 0; j < dimension; ++j) m = std::max(m, std::abs(b(mu + LatticePoint::unit(dimension, j)) - here));
    return m;
  };
  return scan(magnitude, difference, dimension, condition, lambda_max, options);
}

DecayReport decay_report(const Symbol& b, int dimension, DecayCondition condition, std::int64_t lambda_max,
                         const DecayOptions& options) {
  const PointValue magnitude = [&](const LatticePoint& mu) { return operator_norm(b(mu)); };
  const PointValue difference = [&](const LatticePoint& mu) {
    const MatrixC here = b(mu);
    double m = 0.0;
    for (int j = 0; j < dimension; ++j) m = std::max(m, operator_norm(b(mu + LatticePoint::unit(dimension, j)) - here));
    return m;
  };
  return scan(magnitude, difference, dimension, condition, lambda_max, options);
}

DecayReport decay_report(const RadialProfile& g, DecayCondition condition, std::int64_t lambda_max,
                         const DecayOptions& options) {
  const auto lambdas = dyadic_lambdas(lambda_max);
  DecayReport rep;
  rep.condition = condition;
  rep.lambda_max = lambda_max;
  auto shell_sup = [&](std::int64_t lambda, bool differences) {
    double s = 0.0;
    for (std::int64_t r = lambda; r < 2 * lambda; ++r) {
      const double here = g(r);
      if (differences) {
        // A unit step changes |mu|_inf by -1, 0 or +1, and both signs occur on every shell.
        s = std::max({s, std::abs(g(r + 1) - here), std::abs(here - g(r - 1))});
      } else {
        s = std::max(s, std::abs(here));
      }
    }
    return s;
  };
  for (std::int64_t lambda : lambdas) {
    DyadicTerm t;
    t.lambda = lambda;
    t.sup = shell_sup(lambda, condition == DecayCondition::long_range);
    rep.trace.push_back(t);
  }
  classify(rep, options);
  if (condition == DecayCondition::long_range) {
    const std::size_t n = lambdas.size();
    tail_note(rep, shell_sup(lambdas[n - 2], false), shell_sup(lambdas[n - 1], false), options);
  }
  return rep;
}

ScalarProfile telescope_profile(const Crystal& c, const ElementField& r_l, std::size_t anchor) {
  std::vector<TelescopePath> paths;
  for (std::size_t v = 0; v < c.vertex_count(); ++v) {
    if (v != anchor) paths.push_back(telescope_path(c, anchor, {ElementKind::vertex, v}));
  }
  for (std::size_t e = 0; e < c.edge_count(); ++e) paths.push_back(telescope_path(c, anchor, {ElementKind::edge, e}));
  return [&c, &r_l, paths = std::move(paths)](const LatticePoint& mu) {
    double m = 0.0;
    for (const auto& p : paths) m = std::max(m, path_telescope(c, r_l, p, mu));
    return m;
  };
}

}  // namespace cspec
