#pragma once

// JSON form of a CrystalDescriptor:
//
//   {"dimension": d,
//    "vertices": [{"name": "a", "measure": 1.0, "potential": 0.0}, ...],
//    "edges": [{"from": "a", "to": "b", "eta": [0, 1], "measure": 1.0, "potential": 0.0}, ...]}
//
// "from"/"to" take a vertex name or a 0-based vertex index. "measure" defaults
// to 1, "potential" to 0, a missing vertex name to "x<j+1>".

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "cspec/crystal.hpp"

namespace cspec {

nlohmann::json descriptor_to_json(const CrystalDescriptor& d);
/// Throws ValidationError with the JSON path of a malformed field.
CrystalDescriptor descriptor_from_json(const nlohmann::json& j);

std::string serialize_descriptor(const CrystalDescriptor& d);
CrystalDescriptor parse_descriptor(const std::string& text);

/// Reads and parses a descriptor file; a missing file raises LookupError.
CrystalDescriptor load_descriptor(const std::filesystem::path& path);

}  // namespace cspec
