// efl — command-line driver for the emergent-field simulator.
//
// Every subcommand reads a flat key=value scenario config (--config, then
// repeatable --set overrides), runs its checks, writes deterministic CSV
// artifacts under --out, and prints a run report (text, or JSON with --json).
// Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage or
// configuration error.

#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "scenario.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  bool json = false;
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "Scenario file of key = value lines ('#' comments)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir,
                  "Directory for CSV/JSON artifacts (default: .)");
  cmd->add_option("--set", args.overrides,
                  "Override a scenario key, key=value; repeatable")
      ->take_all();
  cmd->add_flag("--json", args.json, "Print the run report as JSON");
}

int run_command(
    const CommonArgs& args,
    const std::function<efl::cli::RunReport(const efl::cli::ScenarioConfig&,
                                            const std::filesystem::path&)>& fn) {
  try {
    efl::cli::ScenarioConfig cfg;
    if (!args.config_path.empty()) cfg.load_file(args.config_path);
    for (const std::string& kv : args.overrides) cfg.apply_override(kv);
    const efl::cli::RunReport report = fn(cfg, args.out_dir);
    if (args.json)
      std::cout << efl::cli::report_json(report);
    else
      std::cout << efl::cli::report_text(report);
    return report.pass() ? 0 : 1;
  } catch (const efl::cli::UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Pilot-wave box-mode simulator: integrates shell-mode trajectories, "
      "reconstructs the emergent localized field and verifies its closed "
      "forms, transformation laws and wave operators."};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    efl::cli::RunReport (*fn)(const efl::cli::ScenarioConfig&,
                              const std::filesystem::path&);
  };
  const std::vector<Entry> entries = {
      {"lattice-info", "Lattice and shell inventory with structural invariants",
       efl::cli::cmd_lattice_info},
      {"integrate",
       "RK4 guidance-flow trajectory on the shell against the rotating-mode "
       "solution",
       efl::cli::cmd_integrate},
      {"reconstruct",
       "Grid reconstruction of the emergent field with radial-profile checks",
       efl::cli::cmd_reconstruct},
      {"oracle", "Tabulate the continuum closed-form field",
       efl::cli::cmd_oracle},
      {"boost-check", "Scalar transformation laws under z-axis boosts",
       efl::cli::cmd_boost_check},
      {"shell-identity",
       "Angular shell quadrature against sin(mu r)/(pi r)",
       efl::cli::cmd_shell_identity},
      {"residual", "Finite-difference wave-operator residuals of a closed form",
       efl::cli::cmd_residual},
      {"phase-check", "Moving-packet dispersion and phase identities",
       efl::cli::cmd_phase_check},
      {"verify", "Full identity battery across all components",
       efl::cli::cmd_verify},
      {"converge", "Order-of-accuracy and shell-density convergence study",
       efl::cli::cmd_converge},
  };

  std::vector<CommonArgs> args(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CLI::App* sub = app.add_subcommand(entries[i].name, entries[i].help);
    attach_common(sub, args[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // any malformed invocation is a usage error
  }

  for (std::size_t i = 0; i < entries.size(); ++i)
    if (app.get_subcommand(entries[i].name)->parsed())
      return run_command(args[i], entries[i].fn);
  return 2;
}
