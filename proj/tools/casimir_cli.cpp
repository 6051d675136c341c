// casimir: Casimir-Polder potentials between two ground-state atoms at finite
// temperature, in free space or above a perfectly conducting wall.
//
//   casimir sweep    --config run.cfg [--jobs N] [--out path|-] [--tol X] [--units natural|cgs]
//   casimir compare  --config run.cfg ...
//   casimir regime   --config run.cfg ...
//   casimir selftest
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 self-test failure.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "casimir/casimir.hpp"
#include "casimir/cli/compare.hpp"
#include "casimir/cli/config.hpp"
#include "casimir/cli/regime_report.hpp"
#include "casimir/cli/selftest.hpp"
#include "casimir/cli/sweep.hpp"

namespace {

using namespace casimir;
using namespace casimir::cli;

struct Options {
  std::string config;
  unsigned jobs = 1;
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<std::string> units;
};

void add_common(CLI::App* cmd, Options& o, bool needs_config) {
  auto* c = cmd->add_option("--config", o.config, "run configuration file");
  if (needs_config) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  cmd->add_option("--out", o.out, "output file, '-' for stdout");
  cmd->add_option("--tol", o.tol, "quadrature relative tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--units", o.units, "unit system")->check(CLI::IsMember({"natural", "cgs"}));
}

RunConfig load(const Options& o) {
  ConfigOverrides over;
  if (o.units) over.units = parse_unit_mode(*o.units);
  over.tolerance = o.tol;
  over.output_path = o.out;
  return load_config(o.config, over);
}

// Opens the configured output target; '-' is stdout.
std::ostream& open_output(const RunConfig& cfg, std::unique_ptr<std::ofstream>& file) {
  if (cfg.output_path == "-") return std::cout;
  file = std::make_unique<std::ofstream>(cfg.output_path);
  if (!*file) throw ConfigError("output.path", "cannot write '" + cfg.output_path + "'");
  return *file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir-Polder interaction of two atoms at finite temperature"};
  app.require_subcommand(1);
  Options opts;
  auto* sweep = app.add_subcommand("sweep", "evaluate the potential over the configured points");
  auto* compare = app.add_subcommand("compare", "evaluate every applicable method side by side");
  auto* regime = app.add_subcommand("regime", "report distance regimes and the applicable limit");
  auto* selftest = app.add_subcommand("selftest", "oracle bootstrap gates and invariant smoke suite");
  add_common(sweep, opts, true);
  add_common(compare, opts, true);
  add_common(regime, opts, true);
  add_common(selftest, opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  try {
    if (selftest->parsed()) return self_test(std::cout);
    const RunConfig cfg = load(opts);
    std::unique_ptr<std::ofstream> file;
    std::ostream& out = open_output(cfg, file);
    if (sweep->parsed()) return run_sweep(cfg, opts.jobs, out, std::cerr);
    if (compare->parsed()) return compare_methods(cfg, opts.jobs, out, std::cerr);
    return regime_report(cfg, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (const OracleGateError& e) {
    std::cerr << "oracle gate failed: " << e.what() << "\n";
    return exit_selftest;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
}
