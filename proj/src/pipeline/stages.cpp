#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <tuple>

#include "cotah/corpus.hpp"
#include "cotah/eval.hpp"
#include "cotah/mining.hpp"
#include "cotah/pipeline.hpp"
#include "cotah/qa.hpp"
#include "cotah/qg.hpp"
#include "cotah/selector.hpp"
#include "cotah/util.hpp"

namespace cotah::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct StageInfo {
  Stage stage;
  std::string_view name;
  std::vector<std::string_view> artifacts;
};

const std::vector<StageInfo>& stage_table() {
  static const std::vector<StageInfo> table = {
      {Stage::split, "split", {"split.json"}},
      {Stage::train_qg, "train-qg", {"generator.json", "train_log.jsonl"}},
      {Stage::eval_qg, "eval-qg", {"qg_metrics.json"}},
      {Stage::mine, "mine", {"candidates.jsonl"}},
      {Stage::generate, "generate", {"synthetic.jsonl"}},
      {Stage::select, "select", {"pools.jsonl", "augmented.jsonl"}},
      {Stage::train_qa, "train-qa", {"reader.json", "train_log.jsonl", "steps.jsonl"}},
      {Stage::evaluate, "evaluate", {"predictions.jsonl", "turn_results.jsonl"}},
      {Stage::report, "report", {"report.json", "per_turn.csv"}},
  };
  return table;
}

const StageInfo& info(Stage s) {
  return stage_table()[static_cast<std::size_t>(s)];
}

fs::path artifact(const PipelineConfig& c, Stage s, std::string_view file) {
  return stage_dir(c, s) / std::string(file);
}

fs::path prepare_dir(const PipelineConfig& c, Stage s) {
  const fs::path dir = stage_dir(c, s);
  fs::create_directories(dir);
  return dir;
}

std::vector<corpus::Dialog> train_corpus(const PipelineConfig& c) {
  if (c.corpus_train.empty()) throw ValidationError("config: corpus.train is not set");
  return corpus::load_corpus(c.corpus_train);
}

std::vector<corpus::Dialog> eval_corpus(const PipelineConfig& c) {
  if (c.corpus_eval.empty()) return train_corpus(c);
  return corpus::load_corpus(c.corpus_eval);
}

corpus::Split load_split(const PipelineConfig& c) {
  return corpus::split_from_json(util::read_json(artifact(c, Stage::split, "split.json")));
}

const std::vector<std::string>& eval_ids(const PipelineConfig& c, const corpus::Split& split) {
  return c.eval_split == "dev" ? split.dev_dialog_ids : split.test_dialog_ids;
}

std::vector<corpus::Dialog> select_dialogs(std::vector<corpus::Dialog> all,
                                           const std::vector<std::string>& ids) {
  std::vector<corpus::Dialog> out;
  for (auto& d : all) {
    if (std::binary_search(ids.begin(), ids.end(), d.dialog_id)) out.push_back(std::move(d));
  }
  if (out.size() != ids.size()) {
    throw ValidationError("split lists dialogs absent from the evaluation corpus");
  }
  return out;
}

std::unique_ptr<qg::GeneratorBackend> make_configured_generator(const PipelineConfig& c) {
  qg::NeuralGeneratorOptions opt;
  opt.hidden = c.qg_hidden;
  opt.max_input_vocab = c.qg_max_vocab;
  opt.max_output_vocab = c.qg_max_vocab;
  opt.learning_rate = c.qg_learning_rate;
  return qg::make_generator(c.qg_backend, opt);
}

std::unique_ptr<qg::GeneratorBackend> load_generator(const PipelineConfig& c) {
  auto g = make_configured_generator(c);
  g->load(util::read_json(artifact(c, Stage::train_qg, "generator.json")));
  return g;
}

qa::TrainConfig reader_config(const PipelineConfig& c) {
  qa::TrainConfig t;
  t.S = c.select_S;
  t.lambda = c.qa_lambda;
  t.tau = c.qa_tau;
  t.seed = c.seed;
  t.max_answer_len = c.qa_max_answer_len;
  t.input_budget = c.qa_input_budget;
  t.batch_size = c.qa_batch_size;
  t.learning_rate = c.qa_learning_rate;
  t.epochs = c.qa_epochs;
  t.init_scale = c.qa_init_scale;
  return t;
}

template <typename T>
std::vector<json> flatten(const std::vector<std::vector<T>>& groups) {
  std::vector<json> rows;
  for (const auto& g : groups) rows.insert(rows.end(), g.begin(), g.end());
  return rows;
}

void log_stage(Stage s, const std::string& message) {
  std::cerr << "[" << stage_name(s) << "] " << message << "\n";
}

void run_split(const PipelineConfig& c) {
  const auto dialogs = eval_corpus(c);
  const corpus::Split split = corpus::split_dev_test(dialogs, c.split_seed.value_or(c.seed));
  util::write_json(prepare_dir(c, Stage::split) / "split.json", corpus::to_json(split));
  log_stage(Stage::split, std::to_string(split.dev_dialog_ids.size()) + " dev / " +
                              std::to_string(split.test_dialog_ids.size()) + " test dialogs");
}

void run_train_qg(const PipelineConfig& c) {
  const auto dialogs = train_corpus(c);
  auto generator = make_configured_generator(c);
  qg::QgTrainConfig tc;
  tc.epochs = c.qg_epochs;
  tc.batch_size = c.qg_batch_size;
  tc.input_budget = c.qg_input_budget;
  tc.seed = c.seed;
  const qg::QgTrainLog log = qg::train_cqg(*generator, dialogs, tc);

  const fs::path dir = prepare_dir(c, Stage::train_qg);
  std::vector<json> rows;
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) {
    rows.push_back({{"epoch", e}, {"loss", log.epoch_loss[e]}});
  }
  util::write_jsonl(dir / "train_log.jsonl", rows);
  util::write_json(dir / "generator.json", generator->save());
  log_stage(Stage::train_qg, "loss " + std::to_string(log.initial_loss) + " -> " +
                                 std::to_string(log.final_loss) + " over " +
                                 std::to_string(log.pairs) + " pairs");
}

void run_eval_qg(const PipelineConfig& c) {
  const auto generator = load_generator(c);
  const auto split = load_split(c);
  const auto dialogs = select_dialogs(eval_corpus(c), split.dev_dialog_ids);
  const qg::DecodeConfig decode{c.qg_max_new_tokens};

  std::vector<std::vector<std::pair<std::string, std::string>>> per_dialog(dialogs.size());
  util::parallel_for(
      dialogs.size(),
      [&](std::size_t i) {
        const auto& d = dialogs[i];
        for (const auto& turn : d.turns) {
          const auto& gold = turn.gold_answers.front();
          if (gold.unanswerable) continue;
          const auto input = qg::serialize_generator_input(
              *d.document, d.history_questions(turn.turn_index), gold.text, gold.char_span,
              c.qg_input_budget);
          per_dialog[i].emplace_back(turn.question, generator->generate(input, decode));
        }
      },
      c.threads);

  std::vector<std::string> refs;
  std::vector<std::string> hyps;
  for (const auto& pairs : per_dialog) {
    for (const auto& [r, h] : pairs) {
      refs.push_back(r);
      hyps.push_back(h);
    }
  }
  const qg::QgScores scores = qg::qg_metrics(refs, hyps);
  util::write_json(prepare_dir(c, Stage::eval_qg) / "qg_metrics.json",
                   {{"bleu1", scores.bleu1},
                    {"bleu4", scores.bleu4},
                    {"rouge_l", scores.rouge_l},
                    {"pairs", refs.size()}});
  log_stage(Stage::eval_qg, "BLEU-1 " + std::to_string(scores.bleu1) + " over " +
                                std::to_string(refs.size()) + " questions");
}

void run_mine(const PipelineConfig& c) {
  const auto dialogs = train_corpus(c);
  const mining::LexiconTagger tagger = c.mine_lexicon.empty()
                                           ? mining::LexiconTagger::builtin()
                                           : mining::LexiconTagger::with_file(c.mine_lexicon);
  const mining::MiningConfig mc{c.mine_max_candidates};
  std::vector<std::vector<json>> per_dialog(dialogs.size());
  util::parallel_for(
      dialogs.size(),
      [&](std::size_t i) {
        const auto& d = dialogs[i];
        for (int j = 0; j + 1 < static_cast<int>(d.turns.size()); ++j) {
          for (const auto& cand : mining::mine_candidates(d, j, tagger, mc)) {
            per_dialog[i].push_back(mining::to_json(cand, d.dialog_id));
          }
        }
      },
      c.threads);
  const auto rows = flatten(per_dialog);
  util::write_jsonl(prepare_dir(c, Stage::mine) / "candidates.jsonl", rows);
  log_stage(Stage::mine, std::to_string(rows.size()) + " candidates");
}

void run_generate(const PipelineConfig& c) {
  const auto dialogs = train_corpus(c);
  const auto generator = load_generator(c);

  std::map<std::pair<std::string, int>, std::vector<mining::CandidateAnswer>> candidates;
  for (const auto& row : util::read_jsonl(artifact(c, Stage::mine, "candidates.jsonl"))) {
    auto cand = mining::candidate_from_json(row);
    candidates[{row.at("dialog_id").get<std::string>(), cand.slot}].push_back(std::move(cand));
  }

  const qg::DecodeConfig decode{c.qg_max_new_tokens};
  std::vector<std::vector<json>> per_dialog(dialogs.size());
  util::parallel_for(
      dialogs.size(),
      [&](std::size_t i) {
        const auto& d = dialogs[i];
        std::size_t order = 0;
        for (int j = 0; j + 1 < static_cast<int>(d.turns.size()); ++j) {
          const auto it = candidates.find({d.dialog_id, j});
          if (it == candidates.end()) continue;
          for (const auto& q : qg::generate_slot_questions(*generator, d, j, it->second, decode,
                                                           c.qg_input_budget, order)) {
            per_dialog[i].push_back(qg::to_json(q, d.dialog_id));
            order = q.order + 1;
          }
        }
      },
      c.threads);
  const auto rows = flatten(per_dialog);
  util::write_jsonl(prepare_dir(c, Stage::generate) / "synthetic.jsonl", rows);
  log_stage(Stage::generate, std::to_string(rows.size()) + " synthetic questions");
}

json pool_to_json(const qg::QuestionPool& pool) {
  json synthetic = json::array();
  for (const auto& q : pool.synthetic) synthetic.push_back(qg::to_json(q, pool.dialog_id));
  return {{"dialog_id", pool.dialog_id}, {"k", pool.k}, {"real", pool.real},
          {"synthetic", synthetic}};
}

void run_select(const PipelineConfig& c) {
  const auto dialogs = train_corpus(c);
  std::map<std::string, std::vector<qg::SyntheticQuestion>> synthetic;
  for (const auto& row : util::read_jsonl(artifact(c, Stage::generate, "synthetic.jsonl"))) {
    synthetic[row.at("dialog_id").get<std::string>()].push_back(qg::synthetic_from_json(row));
  }
  const auto encoder =
      selector::make_encoder(c.select_encoder, c.select_encoder_dim, c.select_embeddings);

  selector::SelectionConfig sc;
  sc.M = c.select_M;
  sc.gamma = c.select_gamma;
  sc.S = c.select_S;
  sc.distribution = selector::parse_distribution(c.select_distribution);
  sc.seed = c.seed;
  const int draws = c.select_resample_each_epoch ? c.qa_epochs : 1;

  std::vector<std::vector<json>> pools(dialogs.size());
  std::vector<std::vector<json>> histories(dialogs.size());
  util::parallel_for(
      dialogs.size(),
      [&](std::size_t i) {
        const auto& d = dialogs[i];
        const auto it = synthetic.find(d.dialog_id);
        const std::span<const qg::SyntheticQuestion> all =
            it == synthetic.end() ? std::span<const qg::SyntheticQuestion>{} : it->second;
        for (int k = std::max(0, c.qa_tau); k < static_cast<int>(d.turns.size()); ++k) {
          const auto pool = selector::prepare_pool(d, k, all, sc, *encoder);
          pools[i].push_back(pool_to_json(pool));
          for (int e = 0; e < draws; ++e) {
            const std::string stream = draws == 1 ? "select" : "select/epoch" + std::to_string(e);
            auto rng = selector::turn_rng(sc.seed, stream, d.dialog_id, k);
            const auto picked = selector::sample_selection(pool, k, sc, rng);
            const auto h = selector::assemble_augmented_history(pool.real, picked);
            json row = selector::to_json(h, d.dialog_id, k);
            row["epoch"] = e;
            histories[i].push_back(std::move(row));
          }
        }
      },
      c.threads);
  const fs::path dir = prepare_dir(c, Stage::select);
  util::write_jsonl(dir / "pools.jsonl", flatten(pools));
  const auto rows = flatten(histories);
  util::write_jsonl(dir / "augmented.jsonl", rows);
  log_stage(Stage::select, std::to_string(rows.size()) + " augmented histories");
}

void run_train_qa(const PipelineConfig& c) {
  const auto dialogs = train_corpus(c);
  const qa::TrainConfig tc = reader_config(c);

  std::map<std::tuple<std::string, int, int>, selector::AugmentedHistory> histories;
  if (tc.S > 0) {
    for (const auto& row : util::read_jsonl(artifact(c, Stage::select, "augmented.jsonl"))) {
      histories[{row.at("dialog_id").get<std::string>(), row.at("k").get<int>(),
                 row.value("epoch", 0)}] = selector::augmented_from_json(row);
    }
  }
  const bool per_epoch = c.select_resample_each_epoch;
  const qa::HistoryProvider provider =
      [&](const corpus::Dialog& d, int k, int epoch) -> std::optional<selector::AugmentedHistory> {
    const auto it = histories.find({d.dialog_id, k, per_epoch ? epoch : 0});
    if (it == histories.end()) return std::nullopt;
    return it->second;
  };

  auto reader = qa::make_reader(c.qa_reader);
  reader->initialize(util::derive_seed(c.seed, "reader-init"), c.qa_init_scale);
  const qa::TrainingLog log = qa::train_qa(*reader, dialogs, provider, tc);

  const fs::path dir = prepare_dir(c, Stage::train_qa);
  std::vector<json> epochs;
  for (const auto& e : log.epochs) epochs.push_back(qa::to_json(e));
  std::vector<json> steps;
  for (const auto& s : log.steps) steps.push_back(qa::to_json(s));
  util::write_jsonl(dir / "train_log.jsonl", epochs);
  util::write_jsonl(dir / "steps.jsonl", steps);
  util::write_json(dir / "reader.json", reader->save());
  std::string summary = std::to_string(log.steps.size()) + " example steps";
  if (!log.epochs.empty()) {
    summary += ", l_cons " + std::to_string(log.epochs.front().mean_l_cons) + " -> " +
               std::to_string(log.epochs.back().mean_l_cons);
  }
  if (log.skipped > 0) {
    summary += ", " + std::to_string(log.skipped) + " turns skipped (answer outside window)";
  }
  log_stage(Stage::train_qa, summary);
}

void run_evaluate(const PipelineConfig& c) {
  const auto split = load_split(c);
  const auto dialogs = select_dialogs(eval_corpus(c), eval_ids(c, split));
  auto reader = qa::make_reader(c.qa_reader);
  reader->load(util::read_json(artifact(c, Stage::train_qa, "reader.json")));

  std::vector<std::vector<json>> predictions(dialogs.size());
  std::vector<std::vector<json>> results(dialogs.size());
  util::parallel_for(
      dialogs.size(),
      [&](std::size_t i) {
        const auto& d = dialogs[i];
        for (const auto& turn : d.turns) {
          const auto input = qa::serialize_reader_input(
              turn.question, d.history_questions(turn.turn_index), *d.document,
              c.qa_input_budget);
          const auto span = qa::decode_span(reader->forward(input), c.qa_max_answer_len);
          const std::string text = input.span_text(*d.document, span);
          const auto chars = input.char_span(span);
          predictions[i].push_back(
              {{"dialog_id", d.dialog_id},
               {"k", turn.turn_index},
               {"qa_id", turn.qa_id},
               {"span_text", text},
               {"start", chars ? static_cast<long long>(chars->begin) : -1LL},
               {"end", chars ? static_cast<long long>(chars->end) : -1LL}});
          const auto refs = turn.reference_texts();
          results[i].push_back({{"dialog_id", d.dialog_id},
                                {"k", turn.turn_index},
                                {"model_f1", eval::token_f1(text, refs)},
                                {"human_f1", turn.human_f1}});
        }
      },
      c.threads);
  const fs::path dir = prepare_dir(c, Stage::evaluate);
  const auto rows = flatten(predictions);
  util::write_jsonl(dir / "predictions.jsonl", rows);
  util::write_jsonl(dir / "turn_results.jsonl", flatten(results));
  log_stage(Stage::evaluate, std::to_string(rows.size()) + " predictions");
}

void run_report(const PipelineConfig& c) {
  const auto split = load_split(c);
  std::vector<eval::TurnResult> results;
  for (const auto& row : util::read_jsonl(artifact(c, Stage::evaluate, "turn_results.jsonl"))) {
    results.push_back({row.at("dialog_id").get<std::string>(), row.at("k").get<int>(),
                       row.at("model_f1").get<double>(), row.at("human_f1").get<double>()});
  }
  const eval::Report report =
      eval::build_report(results, corpus::dialog_set_digest(eval_ids(c, split)));
  const fs::path dir = prepare_dir(c, Stage::report);
  util::write_json(dir / "report.json", eval::to_json(report));
  std::ofstream csv(dir / "per_turn.csv", std::ios::binary);
  csv << eval::per_turn_csv(report);
  if (!csv) throw Error("cannot write " + (dir / "per_turn.csv").string());
  log_stage(Stage::report, "F1 " + std::to_string(report.f1) + ", HEQ-Q " +
                               std::to_string(report.heq_q) + ", HEQ-D " +
                               std::to_string(report.heq_d));
}

}  // namespace

std::string_view stage_name(Stage s) { return info(s).name; }

Stage parse_stage(std::string_view name) {
  for (const auto& i : stage_table()) {
    if (i.name == name) return i.stage;
  }
  throw ValidationError("unknown stage '" + std::string(name) + "'");
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = [] {
    std::vector<Stage> out;
    for (const auto& i : stage_table()) out.push_back(i.stage);
    return out;
  }();
  return stages;
}

std::vector<Stage> prerequisites(Stage s, const PipelineConfig& config) {
  switch (s) {
    case Stage::split: return {};
    case Stage::train_qg: return {Stage::split};
    case Stage::eval_qg: return {Stage::split, Stage::train_qg};
    case Stage::mine: return {};
    case Stage::generate: return {Stage::train_qg, Stage::mine};
    case Stage::select: return {Stage::generate};
    case Stage::train_qa:
      if (config.select_S == 0) return {Stage::split};
      return {Stage::split, Stage::select};
    case Stage::evaluate: return {Stage::split, Stage::train_qa};
    case Stage::report: return {Stage::split, Stage::evaluate};
  }
  return {};
}

std::filesystem::path stage_dir(const PipelineConfig& config, Stage s) {
  return config.workdir / std::string(stage_name(s));
}

bool stage_complete(const PipelineConfig& config, Stage s) {
  for (const auto file : info(s).artifacts) {
    if (!fs::exists(artifact(config, s, file))) return false;
  }
  return true;
}

void run_stage(Stage s, const PipelineConfig& config) {
  for (Stage p : prerequisites(s, config)) {
    if (!stage_complete(config, p)) {
      throw ValidationError(std::string(stage_name(p)) + " artifacts missing");
    }
  }
  switch (s) {
    case Stage::split: return run_split(config);
    case Stage::train_qg: return run_train_qg(config);
    case Stage::eval_qg: return run_eval_qg(config);
    case Stage::mine: return run_mine(config);
    case Stage::generate: return run_generate(config);
    case Stage::select: return run_select(config);
    case Stage::train_qa: return run_train_qa(config);
    case Stage::evaluate: return run_evaluate(config);
    case Stage::report: return run_report(config);
  }
}

void run_all(const PipelineConfig& config) {
  for (Stage s : all_stages()) run_stage(s, config);
}

}  // namespace cotah::pipeline
