#include "cspec_tools/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cspec/crystal_io.hpp"
#include "cspec/errors.hpp"
#include "cspec/floquet.hpp"
#include "cspec/perturbation.hpp"
#include "cspec/spectra.hpp"
#include "cspec_tools/verify.hpp"

namespace cspec::cli {
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSubcommands = {"bands", "spectrum", "verify", "catalog"};
const std::vector<std::int64_t> kDefaultRadii = {100, 200, 400};

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

FiberKind fiber_kind(const std::string& s) {
  return s == "edge" ? FiberKind::edge_laplacian : FiberKind::gauss_bonnet;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string bands_plot_script() {
  return R"(import csv
import matplotlib.pyplot as plt

with open("bands.csv") as fh:
    rows = list(csv.reader(fh))
header, data = rows[0], [[float(x) for x in r] for r in rows[1:]]
dim = sum(1 for h in header if h.startswith("xi_"))
bands = range(dim, len(header))
if dim == 1:
    xs = [r[0] for r in data]
    for b in bands:
        plt.plot(xs, [r[b] for r in data], lw=1)
    plt.xlabel("xi")
else:
    for b in bands:
        plt.plot(range(len(data)), [r[b] for r in data], ",")
    plt.xlabel("grid point")
plt.ylabel("energy")
plt.savefig("bands.png", dpi=150)
)";
}

std::string spectrum_plot_script() {
  return R"(import json
import matplotlib.pyplot as plt

with open("spectrum.json") as fh:
    scan = json.load(fh)
colors = {"inside": "tab:blue", "gap": "tab:red", "near_threshold": "tab:orange"}
for rep in scan["reports"]:
    for value, label in zip(rep["eigenvalues"], rep["labels"]):
        plt.plot([value], [rep["radius"]], "|", color=colors[label])
plt.xlabel("energy")
plt.ylabel("radius")
plt.savefig("spectrum.png", dpi=150)
)";
}

Crystal load_crystal(const RunConfig& config) { return Crystal::build(load_descriptor(config.crystal)); }

}  // namespace

std::vector<std::int64_t> RunConfig::effective_radii() const {
  if (radii.empty()) return kDefaultRadii;
  std::vector<std::int64_t> r = radii;
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

bool RunConfig::wants(const std::string& format) const {
  return formats.empty() || std::find(formats.begin(), formats.end(), format) != formats.end();
}

void RunConfig::validate() const {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end()) {
    throw UsageError("unknown subcommand '" + subcommand + "'");
  }
  if ((subcommand == "bands" || subcommand == "spectrum") && crystal.empty()) {
    throw UsageError(subcommand + " needs --crystal");
  }
  if (!perturbation.empty() && subcommand != "spectrum") {
    throw UsageError("--perturbation applies to spectrum only");
  }
  if (grid < 2 || grid > 4096) throw UsageError("--grid must lie in [2, 4096]");
  for (auto r : radii) {
    if (r < 1) throw UsageError("--radius must be positive");
  }
  if (subcommand == "spectrum" && effective_radii().size() < 2) {
    throw UsageError("spectrum needs at least two distinct radii for the stability scan");
  }
  if (tol && !(std::isfinite(*tol) && *tol > 0.0)) throw UsageError("--tol must be positive");
  for (const auto& f : formats) {
    if (f != "csv" && f != "json") throw UsageError("unknown format '" + f + "'");
  }
  for (const auto& s : suites) {
    if (!is_suite(s)) throw UsageError("unknown suite '" + s + "'");
  }
  if (operator_kind != "gauss_bonnet" && operator_kind != "edge") {
    throw UsageError("--operator must be gauss_bonnet or edge");
  }
  if (out.empty()) throw UsageError("--out must not be empty");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["crystal"] = crystal;
  j["perturbation"] = perturbation;
  j["grid"] = grid;
  j["radii"] = effective_radii();
  j["tol"] = effective_tol();
  j["tol_override"] = tol.has_value();
  j["out"] = out;
  j["formats"] = formats.empty() ? std::vector<std::string>{"csv", "json"} : formats;
  j["seed"] = seed;
  j["suites"] = suites.empty() ? suite_names() : suites;
  j["operator"] = operator_kind;
  j["plot"] = plot;
  return j;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json().dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json provenance(const RunConfig& config) {
  return {{"tool", "cspec"}, {"config", config.to_json()}, {"config_hash", "fnv1a64:" + config.hash()}};
}

OutputSet::OutputSet(fs::path directory) : dir_(std::move(directory)) {}

OutputSet::~OutputSet() {
  std::error_code ec;
  for (const auto& t : temporaries_) fs::remove(t, ec);
}

void OutputSet::add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

std::vector<fs::path> OutputSet::commit() {
  fs::create_directories(dir_);
  for (const auto& [name, content] : files_) {
    const fs::path tmp = dir_ / ("." + name + ".partial");
    temporaries_.push_back(tmp);
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << content;
    os.close();
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < files_.size(); ++i) {
    const fs::path target = dir_ / files_[i].first;
    fs::rename(temporaries_[i], target);
    written.push_back(target);
  }
  temporaries_.clear();
  files_.clear();
  return written;
}

CommandResult cmd_bands(const RunConfig& config, std::ostream& log) {
  const Crystal c = load_crystal(config);
  const FiberKind kind = fiber_kind(config.operator_kind);
  BandStructure bands = compute_bands(c, config.grid, kind);
  estimate_thresholds(c, bands, 30, kind);

  OutputSet out(config.out);
  if (config.wants("csv")) out.add("bands.csv", bands_to_csv(bands));
  if (config.wants("json")) {
    nlohmann::json j = bands_to_json(bands);
    j["provenance"] = provenance(config);
    out.add("bands.json", dump(j));
  }
  if (config.plot) out.add("plot_bands.py", bands_plot_script());
  CommandResult result;
  result.written = out.commit();

  log << "bands: " << bands.points.size() << " grid points, " << bands.band_count << " bands\n";
  for (std::size_t b = 0; b < bands.band_count; ++b) {
    log << "  band " << b + 1 << ": [" << number(bands.band_min[b]) << ", " << number(bands.band_max[b]) << "]\n";
  }
  log << "  thresholds: " << bands.thresholds.size() << "\n";
  return result;
}

CommandResult cmd_spectrum(const RunConfig& config, std::ostream& log) {
  const Crystal c = load_crystal(config);
  const FiberKind kind = fiber_kind(config.operator_kind);
  PerturbationProfile profile;
  if (!config.perturbation.empty()) {
    profile = load_profile(config.perturbation, c.dimension());
    profile.validate(c);
  }
  const PerturbedMeasure m(c, profile);
  const PotentialSplit r(c, profile);

  BandStructure bands = compute_bands(c, config.grid, kind);
  estimate_thresholds(c, bands, 30, kind);
  const auto scan = gap_stability_scan(c, m, r.total(), config.effective_radii(), bands, config.effective_tol(), kind,
                                       profile.table_radius());

  OutputSet out(config.out);
  if (config.wants("json")) {
    nlohmann::json j = scan.to_json();
    j["band_union"] = nlohmann::json::array();
    for (const auto& [lo, hi] : bands.band_union()) j["band_union"].push_back({lo, hi});
    j["thresholds"] = bands.thresholds;
    j["provenance"] = provenance(config);
    out.add("spectrum.json", dump(j));
  }
  if (config.wants("csv")) {
    std::ostringstream csv;
    csv << "radius,index,eigenvalue,label\n";
    for (const auto& rep : scan.reports) {
      for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        csv << rep.radius << ',' << i << ',' << number(rep.eigenvalues[i]) << ',' << to_string(rep.labels[i]) << '\n';
      }
    }
    out.add("spectrum.csv", csv.str());
  }
  if (config.plot) out.add("plot_spectrum.py", spectrum_plot_script());
  CommandResult result;
  result.written = out.commit();

  for (const auto& rep : scan.reports) {
    log << "radius " << rep.radius << ": " << rep.eigenvalues.size() << " eigenvalues, " << rep.gap_count
        << " in gaps, " << rep.near_threshold_count << " near thresholds"
        << (rep.radius_warning ? " (perturbation reaches the boundary)" : "") << "\n";
    for (const auto& g : rep.gap_eigenvalues) {
      log << "  gap eigenvalue " << number(g.value) << " x" << g.multiplicity << "\n";
    }
  }
  log << "verdict: " << scan.verdict() << "\n";
  return result;
}

CommandResult cmd_verify(const RunConfig& config, std::ostream& log) {
  VerifyOptions options;
  options.seed = config.seed;
  options.tolerance = config.tol;
  if (!config.crystal.empty()) {
    options.crystal = load_descriptor(config.crystal);
    options.crystal_label = fs::path(config.crystal).stem().string();
  }
  const auto names = config.suites.empty() ? suite_names() : config.suites;

  std::vector<SuiteResult> results;
  bool all = true;
  for (const auto& name : names) {
    results.push_back(run_suite(name, options));
    all = all && results.back().passed;
  }

  OutputSet out(config.out);
  if (config.wants("json")) {
    nlohmann::json j;
    j["passed"] = all;
    j["suites"] = nlohmann::json::array();
    for (const auto& r : results) j["suites"].push_back(r.to_json());
    j["provenance"] = provenance(config);
    out.add("verify.json", dump(j));
  }
  if (config.wants("csv")) {
    std::ostringstream csv;
    csv << "suite,passed,max_residual,threshold,cases\n";
    for (const auto& r : results) {
      csv << r.name << ',' << (r.passed ? "true" : "false") << ',' << number(r.max_residual) << ','
          << number(r.threshold) << ',' << r.cases << '\n';
    }
    out.add("verify.csv", csv.str());
  }
  CommandResult result;
  result.written = out.commit();

  char line[160];
  std::snprintf(line, sizeof line, "%-14s %-6s %-12s %-12s %s\n", "suite", "result", "max_resid", "threshold", "cases");
  log << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-14s %-6s %-12.3e %-12.3e %zu\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                  r.max_residual, r.threshold, r.cases);
    log << line;
  }
  result.exit_code = all ? exit_ok : exit_numeric;
  return result;
}

CommandResult cmd_catalog(const RunConfig& config, std::ostream& log) {
  OutputSet out(config.out);
  for (const auto& name : catalog_names()) {
    const auto d = standard_lattice(name);
    log << name << ": d=" << d.dimension << " n=" << d.vertices.size() << " l=" << d.edges.size() << "\n";
    out.add(name + ".json", serialize_descriptor(d) + "\n");
  }
  CommandResult result;
  result.written = out.commit();
  return result;
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    config.validate();
    CommandResult r;
    if (config.subcommand == "bands") r = cmd_bands(config, log);
    else if (config.subcommand == "spectrum") r = cmd_spectrum(config, log);
    else if (config.subcommand == "verify") r = cmd_verify(config, log);
    else r = cmd_catalog(config, log);
    for (const auto& p : r.written) log << "wrote " << p.string() << "\n";
    return r.exit_code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return exit_numeric;
  } catch (const WindowError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return exit_numeric;
  } catch (const ValidationError& e) {
    err << "invalid input (" << e.field() << "): " << e.what() << "\n";
    return exit_usage;
  } catch (const Error& e) {
    err << "input error: " << e.what() << "\n";
    return exit_usage;
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return exit_numeric;
  }
}

}  // namespace cspec::cli
