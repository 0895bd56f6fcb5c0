#pragma once
// Stage orchestration.  Every stage reads its inputs from earlier stages'
// directories under the work dir and writes into its own.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cotah/common.hpp"

namespace cotah::pipeline {

// Flat `key = value` config.  Relative paths resolve against the config
// file's directory.  Keys and defaults are listed in README.md.
struct PipelineConfig {
  std::filesystem::path corpus_train;
  std::filesystem::path corpus_eval;  // empty: same as corpus_train
  std::filesystem::path workdir = "work";
  std::uint64_t seed = 1000;
  std::optional<std::uint64_t> split_seed;  // unset: follows seed
  std::size_t threads = 0;  // 0: hardware concurrency

  std::string qg_backend = "neural";
  int qg_epochs = 30;
  std::size_t qg_batch_size = 8;
  double qg_learning_rate = 0.01;
  std::size_t qg_hidden = 32;
  std::size_t qg_max_vocab = 8000;
  std::size_t qg_input_budget = 192;
  std::size_t qg_max_new_tokens = 32;

  std::size_t mine_max_candidates = 20;
  std::filesystem::path mine_lexicon;  // empty: built-in lexicon

  std::size_t select_M = 10;
  double select_gamma = 0.8;
  std::size_t select_S = 2;
  std::string select_distribution = "uniform";
  std::string select_encoder = "hashing";
  std::size_t select_encoder_dim = 256;
  std::filesystem::path select_embeddings;
  bool select_resample_each_epoch = false;

  std::string qa_reader = "linear";
  double qa_lambda = 2.0;
  int qa_tau = 6;
  int qa_epochs = 3;
  double qa_learning_rate = 0.05;
  std::size_t qa_batch_size = 8;
  std::size_t qa_max_answer_len = 30;
  std::size_t qa_input_budget = 384;
  double qa_init_scale = 1.0;

  std::string eval_split = "test";  // test | dev
};

// Throws ParseError on malformed lines, ValidationError on unknown keys or
// bad values.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);
// Applies one `key = value` assignment, as if it appeared in the file.
void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir);
std::vector<std::string> config_keys();

enum class Stage { split, train_qg, eval_qg, mine, generate, select, train_qa, evaluate, report };

std::string_view stage_name(Stage s);
Stage parse_stage(std::string_view name);
const std::vector<Stage>& all_stages();
// Stages whose artifacts `s` reads under the given config.
std::vector<Stage> prerequisites(Stage s, const PipelineConfig& config);
std::filesystem::path stage_dir(const PipelineConfig& config, Stage s);
// True when the stage's completion marker exists.
bool stage_complete(const PipelineConfig& config, Stage s);

// Throws ValidationError("<stage> artifacts missing") when a prerequisite
// has not run.
void run_stage(Stage s, const PipelineConfig& config);
void run_all(const PipelineConfig& config);

}  // namespace cotah::pipeline
