#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cotah/corpus.hpp"
#include "cotah/eval.hpp"
#include "cotah/pipeline.hpp"
#include "cotah/util.hpp"

namespace {

using namespace cotah;

struct StageArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> workdir;
};

void add_stage_options(CLI::App* cmd, StageArgs& args) {
  cmd->add_option("--config", args.config, "Pipeline config file")->required();
  cmd->add_option("--seed", args.seed, "Override the global seed");
  cmd->add_option("--workdir", args.workdir, "Override the work directory");
}

pipeline::PipelineConfig resolve(const StageArgs& args) {
  pipeline::PipelineConfig config = pipeline::load_config(args.config);
  if (args.seed) config.seed = *args.seed;
  if (args.workdir) config.workdir = *args.workdir;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cotah: conversational QA with consistency-trained history augmentation"};
  app.require_subcommand(1);

  StageArgs stage_args;
  std::vector<std::pair<CLI::App*, pipeline::Stage>> stage_cmds;
  for (pipeline::Stage s : pipeline::all_stages()) {
    auto* cmd = app.add_subcommand(std::string(pipeline::stage_name(s)),
                                   "Run the " + std::string(pipeline::stage_name(s)) + " stage");
    add_stage_options(cmd, stage_args);
    stage_cmds.emplace_back(cmd, s);
  }
  auto* all_cmd = app.add_subcommand("all", "Run every stage in order");
  add_stage_options(all_cmd, stage_args);

  std::string report_a;
  std::string report_b;
  bool as_json = false;
  auto* compare_cmd = app.add_subcommand("compare", "Delta table between two reports (b - a)");
  compare_cmd->add_option("a", report_a, "Baseline report.json")->required();
  compare_cmd->add_option("b", report_b, "Compared report.json")->required();
  compare_cmd->add_flag("--json", as_json, "Print the deltas as JSON");

  std::string toy_out;
  int toy_dialogs = 20;
  std::uint64_t toy_seed = 1000;
  auto* toy_cmd = app.add_subcommand("toy-corpus", "Write a synthetic QuAC-format corpus");
  toy_cmd->add_option("--out", toy_out, "Output JSON path")->required();
  toy_cmd->add_option("--dialogs", toy_dialogs, "Number of dialogs")->check(CLI::PositiveNumber);
  toy_cmd->add_option("--seed", toy_seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [cmd, stage] : stage_cmds) {
      if (cmd->parsed()) pipeline::run_stage(stage, resolve(stage_args));
    }
    if (all_cmd->parsed()) pipeline::run_all(resolve(stage_args));
    if (compare_cmd->parsed()) {
      const auto a = eval::report_from_json(util::read_json(report_a));
      const auto b = eval::report_from_json(util::read_json(report_b));
      const auto delta = eval::compare_runs(a, b);
      if (as_json) {
        std::cout << eval::to_json(delta).dump(2) << "\n";
      } else {
        std::cout << eval::format_delta_table(delta);
      }
    }
    if (toy_cmd->parsed()) {
      util::write_json(toy_out, corpus::make_toy_quac(toy_dialogs, toy_seed));
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
