// command line front end: parses flags and config, picks the output stream,
// and dispatches to the command implementations

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace {

int run(int argc, char** argv) {
  using namespace aqst::cli;

  CLI::App app{"state transfer between atoms on a driven three-cavity ring"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_path;
  std::string format;
  std::string only;
  std::uint64_t seed = 0;
  bool dump = false;

  app.add_option("--config", config_path, "configuration file");
  auto* seed_opt =
      app.add_option("--seed", seed, "override the configured rng seed");
  auto* out_opt = app.add_option(
      "--out", out_path, "write data to this file instead of stdout");
  auto* format_opt = app.add_option("--format", format, "data format")
                         ->check(CLI::IsMember({"csv", "json"}));
  auto* only_opt = app.add_option(
      "--only", only, "run a single named check (validate only)");
  app.add_flag("--dump-config", dump,
               "echo the parsed configuration and exit");

  app.add_subcommand("transfer",
                     "run one transfer and report both measurement branches")
      ->fallthrough();
  app.add_subcommand("fidelity-curve",
                     "sweep tau (and optionally theta) and emit curve rows")
      ->fallthrough();
  app.add_subcommand("couplings",
                     "derive effective couplings from physical parameters")
      ->fallthrough();
  app.add_subcommand("secular-sweep",
                     "measure the secular-approximation error across "
                     "drive/coupling ratios")
      ->fallthrough();
  app.add_subcommand("validate", "run the built-in consistency checks")
      ->fallthrough();
  app.add_subcommand("sample",
                     "estimate the success rate by seeded Monte Carlo")
      ->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e, std::cout, std::cerr);
    return exit_usage;
  }

  RunConfig config;
  const bool have_config = !config_path.empty();
  if (have_config) {
    try {
      config = parse_config_file(config_path);
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_usage;
    }
  }
  if (seed_opt->count() > 0) config.protocol.seed = seed;
  if (format_opt->count() > 0)
    config.output.format =
        format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (out_opt->count() > 0) config.output.path = out_path;

  if (dump) {
    if (!have_config) {
      std::cerr << "error: --dump-config needs --config\n";
      return exit_usage;
    }
    dump_config(config, std::cout);
    return exit_ok;
  }

  const auto picked = app.get_subcommands();
  if (picked.empty()) {
    std::cerr << "error: no command given\n" << app.help();
    return exit_usage;
  }
  const std::string verb = picked.front()->get_name();

  if (only_opt->count() > 0 && verb != "validate") {
    std::cerr << "error: --only applies to validate\n";
    return exit_usage;
  }
  if (!have_config && verb != "validate") {
    std::cerr << "error: " << verb << " needs --config\n";
    return exit_usage;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!config.output.path.empty() && config.output.path != "-") {
    file.open(config.output.path, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot open output file '" << config.output.path
                << "'\n";
      return exit_usage;
    }
    out = &file;
  }

  int rc = exit_usage;
  if (verb == "transfer")
    rc = cmd_transfer(config, *out, std::cerr);
  else if (verb == "fidelity-curve")
    rc = cmd_fidelity_curve(config, *out, std::cerr);
  else if (verb == "couplings")
    rc = cmd_couplings(config, *out, std::cerr);
  else if (verb == "secular-sweep")
    rc = cmd_secular_sweep(config, *out, std::cerr);
  else if (verb == "validate")
    rc = cmd_validate(config, only, *out, std::cerr);
  else if (verb == "sample")
    rc = cmd_sample(config, *out, std::cerr);

  out->flush();
  if (!*out) {
    std::cerr << "error: failed to write output\n";
    return exit_usage;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
