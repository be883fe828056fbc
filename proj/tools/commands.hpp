#ifndef PLATOON_TOOLS_COMMANDS_HPP
#define PLATOON_TOOLS_COMMANDS_HPP

#include <filesystem>
#include <string>

#include "platoon/config.hpp"
#include "platoon/datagen.hpp"
#include "platoon/mpc.hpp"
#include "platoon/sim.hpp"

namespace platoon::cli {

// config-file -> typed options (shared with the integration tests)
datagen::CorpusOptions corpus_options(const io::Config& cfg);
mpc::Config mpc_config(const io::Config& cfg, mpc::Mode mode);
sim::ScenarioConfig scenario_config(const io::Config& cfg);

struct Paths {
  std::filesystem::path corpus;
  std::filesystem::path models;
  std::filesystem::path out;
};
Paths resolve_paths(const io::Config& cfg);

int cmd_datagen(const io::Config& cfg);
int cmd_train(const io::Config& cfg);
int cmd_simulate(const io::Config& cfg, const std::string& mode);
int cmd_bench(const io::Config& cfg);
int cmd_report(const std::filesystem::path& log_path, const std::filesystem::path& out_dir);

}  // namespace platoon::cli

#endif
