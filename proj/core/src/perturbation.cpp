#include "cspec/perturbation.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "cspec/errors.hpp"

namespace cspec {

using nlohmann::json;

namespace {

using TableKey = std::tuple<int, std::size_t, LatticePoint>;

TableKey key_of(ElementKind kind, std::size_t base, const LatticePoint& cell) {
  return {kind == ElementKind::vertex ? 0 : 1, base, cell};
}

std::string element_path(const char* list, std::size_t i) {
  return std::string(list) + "[" + std::to_string(i) + "]";
}

void check_element(const Crystal& c, const BaseElement& e, const LatticePoint* mu, const std::string& path) {
  const std::size_t limit = e.kind == ElementKind::vertex ? c.vertex_count() : c.edge_count();
  if (e.index >= limit) throw ValidationError(path, "element index out of range");
  if (mu && mu->dimension() != c.dimension()) throw ValidationError(path + ".mu", "dimension mismatch");
}

void check_law(const Crystal& c, const RadialLaw& law, const std::string& path) {
  if (!std::isfinite(law.amplitude) || !std::isfinite(law.exponent)) {
    throw ValidationError(path, "amplitude and exponent must be finite");
  }
  if (law.index) {
    if (law.target == LawTarget::all) throw ValidationError(path, "an index needs a vertex or edge target");
    const std::size_t limit = law.target == LawTarget::vertices ? c.vertex_count() : c.edge_count();
    if (*law.index >= limit) throw ValidationError(path, "element index out of range");
  }
}

}  // namespace

bool RadialLaw::applies(ElementKind kind, std::size_t base) const {
  if (target == LawTarget::vertices && kind != ElementKind::vertex) return false;
  if (target == LawTarget::edges && kind != ElementKind::edge) return false;
  return !index || *index == base;
}

double RadialLaw::at(const LatticePoint& mu) const {
  return amplitude * std::pow(1.0 + static_cast<double>(mu.sup_norm()), -exponent);
}

std::int64_t PerturbationProfile::table_radius() const {
  std::int64_t r = -1;
  for (const auto* list : {&measure_multipliers, &short_range, &long_range}) {
    for (const auto& e : *list) r = std::max(r, e.mu.sup_norm());
  }
  return r;
}

bool PerturbationProfile::has_laws() const {
  return !measure_laws.empty() || !short_range_laws.empty() || !long_range_laws.empty();
}

void PerturbationProfile::validate(const Crystal& c) const {
  for (std::size_t i = 0; i < measure_multipliers.size(); ++i) {
    const auto& e = measure_multipliers[i];
    const auto path = element_path("measure_multipliers", i);
    check_element(c, e.element, &e.mu, path);
    if (!(e.value > 0.0) || !std::isfinite(e.value)) throw ValidationError(path + ".factor", "must be positive");
  }
  for (std::size_t i = 0; i < measure_laws.size(); ++i) {
    const auto path = element_path("radial_laws", i);
    check_law(c, measure_laws[i], path);
    // 1 + a (1+|mu|)^{-p} > 0 for every mu.
    const auto& law = measure_laws[i];
    if (!(law.amplitude > -1.0)) throw ValidationError(path + ".amplitude", "multiplier must stay positive (amplitude > -1)");
    if (law.exponent < 0.0 && law.amplitude < 0.0) {
      throw ValidationError(path + ".exponent", "a growing negative law eventually makes the measure non-positive");
    }
  }
  for (std::size_t i = 0; i < short_range.size(); ++i) {
    check_element(c, short_range[i].element, &short_range[i].mu, element_path("potential.R_S", i));
  }
  for (std::size_t i = 0; i < long_range.size(); ++i) {
    check_element(c, long_range[i].element, &long_range[i].mu, element_path("potential.R_L", i));
  }
  for (std::size_t i = 0; i < short_range_laws.size(); ++i) {
    check_law(c, short_range_laws[i], element_path("potential.R_S", i));
  }
  for (std::size_t i = 0; i < long_range_laws.size(); ++i) {
    check_law(c, long_range_laws[i], element_path("potential.R_L", i));
  }
}

ProfileField::ProfileField(std::vector<ElementValue> table, std::vector<RadialLaw> laws) : laws_(std::move(laws)) {
  for (const auto& e : table) table_[key_of(e.element.kind, e.element.index, e.mu)] += e.value;
}

double ProfileField::value(ElementKind kind, std::size_t base, const LatticePoint& cell) const {
  double v = 0.0;
  if (auto it = table_.find(key_of(kind, base, cell)); it != table_.end()) v += it->second;
  for (const auto& law : laws_) {
    if (law.applies(kind, base)) v += law.at(cell);
  }
  return v;
}

double ProfileField::vertex(std::size_t base, const LatticePoint& cell) const {
  return value(ElementKind::vertex, base, cell);
}
double ProfileField::edge(std::size_t base, const LatticePoint& cell) const {
  return value(ElementKind::edge, base, cell);
}

PerturbedMeasure::PerturbedMeasure(const Crystal& c, const PerturbationProfile& profile)
    : c_(&c), laws_(profile.measure_laws) {
  profile.validate(c);
  for (const auto& e : profile.measure_multipliers) {
    auto [it, inserted] = table_.emplace(key_of(e.element.kind, e.element.index, e.mu), e.value);
    if (!inserted) it->second *= e.value;
  }
}

PerturbedMeasure::PerturbedMeasure(const Crystal& c) : c_(&c) {}

double PerturbedMeasure::multiplier(ElementKind kind, std::size_t base, const LatticePoint& cell) const {
  double f = 1.0;
  if (auto it = table_.find(key_of(kind, base, cell)); it != table_.end()) f *= it->second;
  for (const auto& law : laws_) {
    if (law.applies(kind, base)) f *= 1.0 + law.at(cell);
  }
  return f;
}

double PerturbedMeasure::vertex(std::size_t base, const LatticePoint& cell) const {
  return c_->descriptor().vertices.at(base).measure * multiplier(ElementKind::vertex, base, cell);
}

double PerturbedMeasure::edge(std::size_t base, const LatticePoint& cell) const {
  return c_->descriptor().edges.at(base).measure * multiplier(ElementKind::edge, base, cell);
}

class PotentialSplit::Total final : public ElementField {
 public:
  Total(PeriodicPotentialField p, std::shared_ptr<ProfileField> s, std::shared_ptr<ProfileField> l)
      : p_(p), s_(std::move(s)), l_(std::move(l)) {}
  double vertex(std::size_t base, const LatticePoint& cell) const override {
    return p_.vertex(base, cell) + s_->vertex(base, cell) + l_->vertex(base, cell);
  }
  double edge(std::size_t base, const LatticePoint& cell) const override {
    return p_.edge(base, cell) + s_->edge(base, cell) + l_->edge(base, cell);
  }

 private:
  PeriodicPotentialField p_;
  std::shared_ptr<ProfileField> s_;
  std::shared_ptr<ProfileField> l_;
};

PotentialSplit::PotentialSplit(const Crystal& c, const PerturbationProfile& profile)
    : periodic_(c),
      short_(std::make_shared<ProfileField>(profile.short_range, profile.short_range_laws)),
      long_(std::make_shared<ProfileField>(profile.long_range, profile.long_range_laws)) {
  profile.validate(c);
  total_ = std::make_shared<Total>(periodic_, short_, long_);
}

PotentialSplit::PotentialSplit(const Crystal& c) : PotentialSplit(c, PerturbationProfile{}) {}

namespace {

CrystalCochain apply_operator(const Crystal& c, const ElementField& m, const ElementField& r, const CrystalCochain& f,
                              std::int64_t window) {
  const std::int64_t reach = f.support_radius() + c.max_eta_norm();
  if (f.support_radius() >= 0 && reach > window) {
    throw WindowError("cochain support radius " + std::to_string(f.support_radius()) + " plus edge reach " +
                      std::to_string(c.max_eta_norm()) + " exceeds the window " + std::to_string(window));
  }
  const auto& d = c.descriptor();
  std::set<CellKey> vout;
  std::set<CellKey> eout;
  for (const auto& [key, v] : f.vertex) {
    if (v == Complex{}) continue;
    vout.insert(key);
    for (const auto& e : c.star({key.base, key.cell})) eout.insert(c.unoriented_key(e));
  }
  for (const auto& [key, v] : f.edge) {
    if (v == Complex{}) continue;
    eout.insert(key);
    const auto& be = d.edges[key.base];
    vout.insert({be.from, key.cell});
    vout.insert({be.to, key.cell + be.eta});
  }

  CrystalCochain out;
  for (const auto& x : vout) {
    const double mg_x = d.vertices[x.base].measure;
    const double m_x = m.vertex(x.base, x.cell);
    Complex acc = r.vertex(x.base, x.cell) * f.at_vertex(x);
    for (const auto& e : c.star({x.base, x.cell})) {
      const CellKey ek = c.unoriented_key(e);
      const double mg_e = d.edges[e.base].measure;
      const double m_e = m.edge(ek.base, ek.cell);
      const Complex fe = f.at_edge(e, c.eta(e.base));
      // D(X, m_Gamma) part, then the kernel of J D(X,m) J^* - D(X, m_Gamma).
      acc += -(mg_e / mg_x) * fe;
      acc += (mg_e / mg_x - std::sqrt(mg_e * m_e) / std::sqrt(mg_x * m_x)) * fe;
    }
    if (acc != Complex{}) out.vertex[x] = acc;
  }
  for (const auto& ek : eout) {
    const auto& be = d.edges[ek.base];
    const CellKey o{be.from, ek.cell};
    const CellKey t{be.to, ek.cell + be.eta};
    const double mg_e = be.measure;
    const double m_e = m.edge(ek.base, ek.cell);
    const double mg_o = d.vertices[o.base].measure;
    const double mg_t = d.vertices[t.base].measure;
    const double m_o = m.vertex(o.base, o.cell);
    const double m_t = m.vertex(t.base, t.cell);
    const Complex ft = f.at_vertex(t);
    const Complex fo = f.at_vertex(o);
    auto fe = f.edge.find(ek);
    Complex acc = fe == f.edge.end() ? Complex{} : r.edge(ek.base, ek.cell) * fe->second;
    acc += ft - fo;
    acc += (std::sqrt(mg_t * m_e) / std::sqrt(mg_e * m_t) - 1.0) * ft;
    acc += (1.0 - std::sqrt(mg_o * m_e) / std::sqrt(mg_e * m_o)) * fo;
    if (acc != Complex{}) out.edge[ek] = acc;
  }
  return out;
}

}  // namespace

CrystalCochain apply_perturbed_H(const Crystal& c, const ElementField& m, const ElementField& r,
                                 const CrystalCochain& f, std::int64_t window) {
  return apply_operator(c, m, r, f, window);
}

CrystalCochain apply_periodic_H0(const Crystal& c, const CrystalCochain& f, std::int64_t window) {
  return apply_operator(c, PeriodicMeasureField(c), PeriodicPotentialField(c), f, window);
}

std::vector<CrystalEdge> find_path(const Crystal& c, const CrystalVertex& from, const CrystalVertex& to,
                                   std::int64_t max_radius) {
  if (from == to) return {};
  const std::int64_t base_radius = std::max(from.cell.sup_norm(), to.cell.sup_norm());
  for (std::int64_t r = base_radius + 1; r <= base_radius + max_radius; ++r) {
    std::map<CrystalVertex, CrystalEdge> parent;
    std::set<CrystalVertex> seen{from};
    std::deque<CrystalVertex> queue{from};
    bool found = false;
    while (!queue.empty() && !found) {
      const CrystalVertex v = queue.front();
      queue.pop_front();
      for (const auto& e : c.star(v)) {
        const CrystalVertex w = c.terminus(e);
        if (w.cell.sup_norm() > r || seen.count(w)) continue;
        seen.insert(w);
        parent.emplace(w, e);
        if (w == to) {
          found = true;
          break;
        }
        queue.push_back(w);
      }
    }
    if (!found) continue;
    std::vector<CrystalEdge> path;
    for (CrystalVertex v = to; !(v == from);) {
      const CrystalEdge& e = parent.at(v);
      path.push_back(e);
      v = c.origin(e);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }
  throw ConfigurationError("no path between base vertices " + std::to_string(from.base) + " and " +
                           std::to_string(to.base) + " within radius " + std::to_string(max_radius));
}

TelescopePath telescope_path(const Crystal& c, std::size_t from_vertex, BaseElement target) {
  if (from_vertex >= c.vertex_count()) throw LookupError("unknown base vertex " + std::to_string(from_vertex));
  const LatticePoint zero(c.dimension());
  TelescopePath p;
  std::size_t end_vertex = target.index;
  if (target.kind == ElementKind::edge) {
    if (target.index >= c.edge_count()) throw LookupError("unknown base edge " + std::to_string(target.index));
    end_vertex = c.descriptor().edges[target.index].from;
    p.final_edge = target.index;
  } else if (target.index >= c.vertex_count()) {
    throw LookupError("unknown base vertex " + std::to_string(target.index));
  }
  p.edges = find_path(c, {from_vertex, zero}, {end_vertex, zero});
  return p;
}

double path_telescope(const Crystal& c, const ElementField& r_l, const TelescopePath& path, const LatticePoint& mu) {
  auto on_vertex = [&](const CrystalVertex& v) { return r_l.vertex(v.base, v.cell); };
  auto on_edge = [&](const CrystalEdge& e) {
    const CellKey k = c.unoriented_key(e);
    return r_l.edge(k.base, k.cell);
  };
  double bound = 0.0;
  for (CrystalEdge e : path.edges) {
    e.cell += mu;
    const double re = on_edge(e);
    bound += std::abs(on_vertex(c.terminus(e)) - re) + std::abs(re - on_vertex(c.origin(e)));
  }
  if (path.final_edge) {
    const CrystalEdge e{*path.final_edge, false, mu};
    bound += std::abs(on_edge(e) - on_vertex(c.origin(e)));
  }
  return bound;
}

double path_telescope(const Crystal& c, const ElementField& r_l, std::size_t from_vertex, BaseElement target,
                      const LatticePoint& mu) {
  return path_telescope(c, r_l, telescope_path(c, from_vertex, target), mu);
}

namespace {

json element_json(const ElementValue& e, const char* value_key) {
  json j;
  j[e.element.kind == ElementKind::vertex ? "vertex" : "edge"] = e.element.index;
  j["mu"] = e.mu.to_vector();
  j[value_key] = e.value;
  return j;
}

json law_json(const RadialLaw& law) {
  json j;
  if (law.index) {
    j[law.target == LawTarget::vertices ? "vertex" : "edge"] = *law.index;
  } else {
    j["target"] = law.target == LawTarget::all ? "all" : law.target == LawTarget::vertices ? "vertices" : "edges";
  }
  j["amplitude"] = law.amplitude;
  j["exponent"] = law.exponent;
  return j;
}

double require_number(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw ValidationError(path + "." + key, "expected a number");
  return it->get<double>();
}

std::size_t require_index(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ValidationError(path, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

BaseElement parse_element(const json& j, const std::string& path) {
  const bool has_v = j.contains("vertex");
  const bool has_e = j.contains("edge");
  if (has_v == has_e) throw ValidationError(path, "exactly one of \"vertex\" or \"edge\" is required");
  if (has_v) return {ElementKind::vertex, require_index(j["vertex"], path + ".vertex")};
  return {ElementKind::edge, require_index(j["edge"], path + ".edge")};
}

LatticePoint parse_mu(const json& j, int dimension, const std::string& path) {
  auto it = j.find("mu");
  if (it == j.end() || !it->is_array()) throw ValidationError(path + ".mu", "expected an integer array");
  std::vector<std::int64_t> coords;
  for (const auto& c : *it) {
    if (!c.is_number_integer()) throw ValidationError(path + ".mu", "expected integers");
    coords.push_back(c.get<std::int64_t>());
  }
  if (static_cast<int>(coords.size()) != dimension) {
    throw ValidationError(path + ".mu", "expected " + std::to_string(dimension) + " components");
  }
  return LatticePoint(std::span<const std::int64_t>(coords));
}

ElementValue parse_value(const json& j, int dimension, const char* value_key, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  return {parse_element(j, path), parse_mu(j, dimension, path), require_number(j, value_key, path)};
}

RadialLaw parse_law(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  RadialLaw law;
  if (j.contains("vertex") || j.contains("edge")) {
    const auto e = parse_element(j, path);
    law.target = e.kind == ElementKind::vertex ? LawTarget::vertices : LawTarget::edges;
    law.index = e.index;
  } else if (auto it = j.find("target"); it != j.end()) {
    const std::string t = it->is_string() ? it->get<std::string>() : "";
    if (t == "all") {
      law.target = LawTarget::all;
    } else if (t == "vertices") {
      law.target = LawTarget::vertices;
    } else if (t == "edges") {
      law.target = LawTarget::edges;
    } else {
      throw ValidationError(path + ".target", "expected \"all\", \"vertices\" or \"edges\"");
    }
  }
  law.amplitude = require_number(j, "amplitude", path);
  law.exponent = require_number(j, "exponent", path);
  return law;
}

// A potential part is a law object, or an array mixing table entries and laws.
void parse_potential_part(const json& j, int dimension, const std::string& path, std::vector<ElementValue>& table,
                          std::vector<RadialLaw>& laws) {
  if (j.is_object()) {
    laws.push_back(parse_law(j, path));
    return;
  }
  if (!j.is_array()) throw ValidationError(path, "expected an object or an array");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto p = path + "[" + std::to_string(i) + "]";
    if (j[i].is_object() && j[i].contains("amplitude")) {
      laws.push_back(parse_law(j[i], p));
    } else {
      table.push_back(parse_value(j[i], dimension, "value", p));
    }
  }
}

}  // namespace

json profile_to_json(const PerturbationProfile& p) {
  json j;
  j["measure_multipliers"] = json::array();
  for (const auto& e : p.measure_multipliers) j["measure_multipliers"].push_back(element_json(e, "factor"));
  j["radial_laws"] = json::array();
  for (const auto& l : p.measure_laws) j["radial_laws"].push_back(law_json(l));
  json rs = json::array();
  for (const auto& e : p.short_range) rs.push_back(element_json(e, "value"));
  for (const auto& l : p.short_range_laws) rs.push_back(law_json(l));
  json rl = json::array();
  for (const auto& e : p.long_range) rl.push_back(element_json(e, "value"));
  for (const auto& l : p.long_range_laws) rl.push_back(law_json(l));
  j["potential"] = {{"R_S", rs}, {"R_L", rl}};
  return j;
}

PerturbationProfile profile_from_json(const json& j, int dimension) {
  if (!j.is_object()) throw ValidationError("$", "profile must be a JSON object");
  PerturbationProfile p;
  if (auto it = j.find("measure_multipliers"); it != j.end()) {
    if (!it->is_array()) throw ValidationError("measure_multipliers", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      p.measure_multipliers.push_back(
          parse_value((*it)[i], dimension, "factor", element_path("measure_multipliers", i)));
    }
  }
  if (auto it = j.find("radial_laws"); it != j.end()) {
    if (!it->is_array()) throw ValidationError("radial_laws", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) p.measure_laws.push_back(parse_law((*it)[i], element_path("radial_laws", i)));
  }
  if (auto it = j.find("potential"); it != j.end()) {
    if (!it->is_object()) throw ValidationError("potential", "expected an object");
    if (auto rs = it->find("R_S"); rs != it->end()) {
      parse_potential_part(*rs, dimension, "potential.R_S", p.short_range, p.short_range_laws);
    }
    if (auto rl = it->find("R_L"); rl != it->end()) {
      parse_potential_part(*rl, dimension, "potential.R_L", p.long_range, p.long_range_laws);
    }
  }
  return p;
}

PerturbationProfile load_profile(const std::string& path, int dimension) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open perturbation profile '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ValidationError("$", std::string("malformed JSON: ") + e.what());
  }
  return profile_from_json(j, dimension);
}

}  // namespace cspec
