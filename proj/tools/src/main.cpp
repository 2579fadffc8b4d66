#include <iostream>

#include <CLI11.hpp>

#include "cspec_tools/commands.hpp"
#include "cspec_tools/verify.hpp"

int main(int argc, char** argv) {
  using cspec::cli::RunConfig;
  CLI::App app{"Band structures, truncated spectra and invariant checks for weighted topological crystals"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.footer("Environment: CRYSTAL_SPECTRA_THREADS caps the worker count.\n"
             "Exit codes: 0 ok, 2 usage or input error, 3 numeric failure or failed verification.");

  RunConfig config;
  double tol = 1e-6;
  std::string suites_help = "Suite to run (repeatable; default all):";
  for (const auto& s : cspec::cli::suite_names()) suites_help += " " + s;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", config.out, "Output directory")->capture_default_str();
    sub->add_option("--format", config.formats, "Output format, csv or json (repeatable; default both)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", config.seed, "Seed for random test data")->capture_default_str();
  };

  auto* bands = app.add_subcommand("bands", "Band structure on a uniform torus grid");
  bands->add_option("--crystal", config.crystal, "Crystal descriptor (JSON)")->required();
  bands->add_option("--grid", config.grid, "Grid points per axis")->capture_default_str();
  bands->add_option("--operator", config.operator_kind, "gauss_bonnet or edge")->capture_default_str();
  bands->add_flag("--plot", config.plot, "Also write a matplotlib script");
  common(bands);

  auto* spectrum = app.add_subcommand("spectrum", "Truncated spectra across radii and their stability");
  spectrum->add_option("--crystal", config.crystal, "Crystal descriptor (JSON)")->required();
  spectrum->add_option("--perturbation", config.perturbation, "Perturbation profile (JSON)");
  spectrum->add_option("--grid", config.grid, "Grid points per axis for the band union")->capture_default_str();
  spectrum->add_option("--radius", config.radii, "Truncation radius (repeatable; default 100 200 400)");
  spectrum->add_option("--tol", tol, "Classification tolerance")->capture_default_str();
  spectrum->add_option("--operator", config.operator_kind, "gauss_bonnet or edge")->capture_default_str();
  spectrum->add_flag("--plot", config.plot, "Also write a matplotlib script");
  common(spectrum);

  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--suite", config.suites, suites_help);
  verify->add_option("--crystal", config.crystal, "Restrict crystal-based suites to this descriptor");
  verify->add_option("--tol", tol, "Replace every suite threshold");
  common(verify);

  auto* catalog = app.add_subcommand("catalog", "List the standard crystals and write their descriptors");
  catalog->add_option("--out", config.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cspec::cli::exit_usage;
  }

  config.subcommand = app.get_subcommands().front()->get_name();
  const auto* tol_opt = app.get_subcommands().front()->get_option_no_throw("--tol");
  if (tol_opt != nullptr && tol_opt->count() > 0) config.tol = tol;
  return cspec::cli::run(config, std::cout, std::cerr);
}
