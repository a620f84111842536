#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "evykit/commands.hpp"
#include "evykit/version.hpp"

// evykit <evy|kernel|fit|simulate|msy|audit> --config <path> [--data <csv>]
//        [--out <dir>]
//
// Exit codes: 0 success, 2 config error, 3 domain/precondition error,
// 4 I/O error.

namespace {

struct CommonArgs {
  std::string config;
  std::string data;
  std::string out = ".";
};

void add_common(CLI::App* sub, CommonArgs& args, bool with_data) {
  sub->add_option("--config", args.config, "run configuration file")
      ->required();
  if (with_data) {
    sub->add_option("--data", args.data, "input CSV dataset")->required();
  }
  sub->add_option("--out", args.out, "output directory (default: .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("evykit ") + evy::kVersion +
               " — viable yields, viability kernels and MSY for harvested "
               "predator–prey ecosystems"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* evy_cmd = app.add_subcommand(
      "evy", "ecosystem viable yields and equilibrium catches");
  CLI::App* kernel_cmd = app.add_subcommand(
      "kernel", "grid viability kernel with analytic cross-check");
  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "fit model parameters to a biomass/catch series");
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "multi-year harvest simulation with audit");
  CLI::App* msy_cmd = app.add_subcommand(
      "msy", "multispecies and single-stock maximum sustainable yields");
  CLI::App* audit_cmd = app.add_subcommand(
      "audit", "check a trajectory CSV against the configured floors");

  add_common(evy_cmd, args, false);
  add_common(kernel_cmd, args, false);
  add_common(fit_cmd, args, true);
  add_common(simulate_cmd, args, false);
  add_common(msy_cmd, args, false);
  add_common(audit_cmd, args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const evy::RunConfig cfg = evy::load_config(args.config);
    if (evy_cmd->parsed()) {
      evy::cmd_evy(cfg, args.out);
    } else if (kernel_cmd->parsed()) {
      evy::cmd_kernel(cfg, args.out);
    } else if (fit_cmd->parsed()) {
      evy::cmd_fit(cfg, args.data, args.out);
    } else if (simulate_cmd->parsed()) {
      evy::cmd_simulate(cfg, args.out);
    } else if (msy_cmd->parsed()) {
      evy::cmd_msy(cfg, args.out);
    } else if (audit_cmd->parsed()) {
      evy::cmd_audit(cfg, args.data, args.out);
    }
    return 0;
  } catch (const evy::config_error& e) {
    std::cerr << "evykit: config error: " << e.what() << "\n";
    return 2;
  } catch (const evy::io_error& e) {
    std::cerr << "evykit: I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::domain_error& e) {
    std::cerr << "evykit: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "evykit: invalid value: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "evykit: error: " << e.what() << "\n";
    return 1;
  }
}
