#include "cspec/crystal_io.hpp"

#include <fstream>
#include <sstream>

#include "cspec/errors.hpp"

namespace cspec {

using nlohmann::json;

namespace {

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ValidationError(path + "." + key, "expected a number");
  return it->get<double>();
}

std::size_t vertex_ref(const json& v, const std::vector<BaseVertex>& vertices, const std::string& path) {
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    return v.get<std::size_t>();
  }
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    for (std::size_t j = 0; j < vertices.size(); ++j) {
      if (vertices[j].name == name) return j;
    }
    throw ValidationError(path, "unknown vertex name '" + name + "'");
  }
  throw ValidationError(path, "expected a vertex name or a non-negative index");
}

}  // namespace

json descriptor_to_json(const CrystalDescriptor& d) {
  json out;
  out["dimension"] = d.dimension;
  json vs = json::array();
  for (const auto& v : d.vertices) {
    vs.push_back({{"name", v.name}, {"measure", v.measure}, {"potential", v.potential}});
  }
  out["vertices"] = vs;
  auto ref = [&](std::size_t j) -> json {
    const auto& name = d.vertices.at(j).name;
    if (name.empty()) return j;
    return name;
  };
  json es = json::array();
  for (const auto& e : d.edges) {
    es.push_back({{"from", ref(e.from)},
                  {"to", ref(e.to)},
                  {"eta", e.eta.to_vector()},
                  {"measure", e.measure},
                  {"potential", e.potential}});
  }
  out["edges"] = es;
  return out;
}

CrystalDescriptor descriptor_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("$", "descriptor must be a JSON object");
  CrystalDescriptor d;
  auto dim = j.find("dimension");
  if (dim == j.end() || !dim->is_number_integer()) throw ValidationError("dimension", "expected an integer");
  d.dimension = dim->get<int>();

  auto vs = j.find("vertices");
  if (vs == j.end() || !vs->is_array()) throw ValidationError("vertices", "expected an array");
  for (std::size_t i = 0; i < vs->size(); ++i) {
    const auto& v = (*vs)[i];
    const std::string path = "vertices[" + std::to_string(i) + "]";
    if (!v.is_object()) throw ValidationError(path, "expected an object");
    BaseVertex bv;
    if (auto it = v.find("name"); it != v.end()) {
      if (!it->is_string()) throw ValidationError(path + ".name", "expected a string");
      bv.name = it->get<std::string>();
    } else {
      bv.name = "x" + std::to_string(i + 1);
    }
    bv.measure = number_or(v, "measure", 1.0, path);
    bv.potential = number_or(v, "potential", 0.0, path);
    d.vertices.push_back(std::move(bv));
  }

  auto es = j.find("edges");
  if (es == j.end() || !es->is_array()) throw ValidationError("edges", "expected an array");
  for (std::size_t i = 0; i < es->size(); ++i) {
    const auto& e = (*es)[i];
    const std::string path = "edges[" + std::to_string(i) + "]";
    if (!e.is_object()) throw ValidationError(path, "expected an object");
    if (!e.contains("from")) throw ValidationError(path + ".from", "missing");
    if (!e.contains("to")) throw ValidationError(path + ".to", "missing");
    BaseEdge be;
    be.from = vertex_ref(e["from"], d.vertices, path + ".from");
    be.to = vertex_ref(e["to"], d.vertices, path + ".to");
    auto eta = e.find("eta");
    if (eta == e.end() || !eta->is_array()) throw ValidationError(path + ".eta", "expected an integer array");
    std::vector<std::int64_t> coords;
    for (const auto& c : *eta) {
      if (!c.is_number_integer()) throw ValidationError(path + ".eta", "expected integers");
      coords.push_back(c.get<std::int64_t>());
    }
    if (coords.size() > static_cast<std::size_t>(kMaxDimension)) {
      throw ValidationError(path + ".eta", "too many components");
    }
    be.eta = LatticePoint(std::span<const std::int64_t>(coords));
    be.measure = number_or(e, "measure", 1.0, path);
    be.potential = number_or(e, "potential", 0.0, path);
    d.edges.push_back(std::move(be));
  }
  return d;
}

std::string serialize_descriptor(const CrystalDescriptor& d) { return descriptor_to_json(d).dump(2) + "\n"; }

CrystalDescriptor parse_descriptor(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("$", std::string("malformed JSON: ") + e.what());
  }
  return descriptor_from_json(j);
}

CrystalDescriptor load_descriptor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open crystal descriptor '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_descriptor(ss.str());
}

}  // namespace cspec
