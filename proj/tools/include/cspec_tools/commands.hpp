#pragma once

// Subcommands of the cspec front end, callable without the argument parser.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cspec::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numeric = 3;

/// Bad flags or flag combinations; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  std::string crystal;       // descriptor path
  std::string perturbation;  // profile path, optional
  std::size_t grid = 64;
  std::vector<std::int64_t> radii;  // empty: {100, 200, 400}
  std::optional<double> tol;        // classification tolerance / verify threshold override
  std::string out = ".";
  std::vector<std::string> formats;  // empty: csv and json
  std::uint64_t seed = 7;
  std::vector<std::string> suites;  // verify; empty: all
  std::string operator_kind = "gauss_bonnet";
  bool plot = false;

  std::vector<std::int64_t> effective_radii() const;
  double effective_tol() const { return tol.value_or(1e-6); }
  bool wants(const std::string& format) const;
  /// Throws UsageError.
  void validate() const;
  /// Every setting, defaults included.
  nlohmann::json to_json() const;
  /// FNV-1a 64 of to_json().dump(), as 16 hex digits.
  std::string hash() const;
};

struct CommandResult {
  int exit_code = exit_ok;
  std::vector<std::filesystem::path> written;
};

CommandResult cmd_bands(const RunConfig& config, std::ostream& log);
CommandResult cmd_spectrum(const RunConfig& config, std::ostream& log);
CommandResult cmd_verify(const RunConfig& config, std::ostream& log);
CommandResult cmd_catalog(const RunConfig& config, std::ostream& log);

/// Validates and dispatches; library errors become exit codes with a message on `err`.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// {"tool", "config", "config_hash"}, no timestamps.
nlohmann::json provenance(const RunConfig& config);

/// Collects named outputs and publishes them together: every file is written to a
/// temporary name first and renamed only once all writes succeeded.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path directory);
  ~OutputSet();
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  void add(const std::string& name, std::string content);
  std::vector<std::filesystem::path> commit();

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<std::filesystem::path> temporaries_;
};

}  // namespace cspec::cli
