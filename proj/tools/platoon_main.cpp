#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "platoon/errors.hpp"

namespace {

platoon::io::Config load_config(const std::string& path, const std::string& seed_override,
                                const std::string& out_override) {
  platoon::io::Config cfg = platoon::io::Config::parse_file(path);
  if (!seed_override.empty()) {
    cfg.set("scenario.seed", seed_override);
  }
  if (!out_override.empty()) {
    cfg.set("paths.out", out_override);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GP-corrected driver modeling and chance-constrained platoon MPC"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mode = "gp";
  std::string seed_override;
  std::string out_override;
  std::string log_path;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* opt = sub->add_option("--config", config_path, "experiment config file");
    if (needs_config) {
      opt->required();
    }
    sub->add_option("--seed", seed_override, "override scenario.seed");
    sub->add_option("--out", out_override, "override paths.out");
  };

  CLI::App* sub_datagen = app.add_subcommand("datagen", "generate the synthetic driving corpus");
  add_common(sub_datagen);
  CLI::App* sub_train = app.add_subcommand("train", "train full + sparse discrepancy models");
  add_common(sub_train);
  CLI::App* sub_sim = app.add_subcommand("simulate", "run the closed-loop platoon scenario");
  add_common(sub_sim);
  sub_sim->add_option("--mode", mode, "controller mode")
      ->check(CLI::IsMember({"nominal", "gp"}));
  CLI::App* sub_bench = app.add_subcommand("bench", "time both controller modes");
  add_common(sub_bench);
  CLI::App* sub_report = app.add_subcommand("report", "render SVG plots from a trajectory log");
  sub_report->add_option("log", log_path, "trajectory CSV")->required();
  sub_report->add_option("--out", out_override, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sub_datagen->parsed()) {
      return platoon::cli::cmd_datagen(load_config(config_path, seed_override, out_override));
    }
    if (sub_train->parsed()) {
      return platoon::cli::cmd_train(load_config(config_path, seed_override, out_override));
    }
    if (sub_sim->parsed()) {
      return platoon::cli::cmd_simulate(load_config(config_path, seed_override, out_override),
                                        mode);
    }
    if (sub_bench->parsed()) {
      return platoon::cli::cmd_bench(load_config(config_path, seed_override, out_override));
    }
    if (sub_report->parsed()) {
      const std::filesystem::path log(log_path);
      const std::filesystem::path out =
          out_override.empty() ? log.parent_path() : std::filesystem::path(out_override);
      return platoon::cli::cmd_report(log, out.empty() ? "." : out);
    }
  } catch (const platoon::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const platoon::MalformedLog& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
