#include <algorithm>
#include <cctype>

#include "cotah/qg.hpp"
#include "cotah/util.hpp"

namespace cotah::qg {

std::vector<TrainingPair> build_training_pairs(std::span<const corpus::Dialog> dialogs,
                                               std::size_t budget) {
  std::vector<TrainingPair> pairs;
  for (const auto& dialog : dialogs) {
    for (const auto& turn : dialog.turns) {
      const auto& gold = turn.gold_answers.front();
      const auto history = dialog.history_questions(turn.turn_index);
      TrainingPair pair;
      pair.input = serialize_generator_input(*dialog.document, history, gold.text,
                                             gold.char_span, budget);
      for (auto& t : corpus::tokenize(turn.question)) pair.target.push_back(std::move(t.text));
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

double mean_loss(const GeneratorBackend& backend, std::span<const TrainingPair> pairs) {
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : pairs) total += backend.loss(p);
  return total / static_cast<double>(pairs.size());
}

QgTrainLog train_cqg(GeneratorBackend& backend, std::span<const corpus::Dialog> dialogs,
                     const QgTrainConfig& config) {
  const auto pairs = build_training_pairs(dialogs, config.input_budget);
  if (pairs.empty()) throw ValidationError("train_cqg: no training dialogs");
  backend.prepare(pairs, config.seed);

  QgTrainLog log;
  log.pairs = pairs.size();
  log.initial_loss = mean_loss(backend, pairs);
  std::vector<std::size_t> order(pairs.size());
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    util::Rng rng(util::derive_seed(config.seed, "train-qg", "", epoch));
    rng.shuffle(order);
    double epoch_total = 0.0;
    std::size_t batches = 0;
    std::vector<TrainingPair> chunk;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      chunk.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + batch); ++i) {
        chunk.push_back(pairs[order[i]]);
      }
      epoch_total += backend.train_step(chunk);
      ++batches;
    }
    log.epoch_loss.push_back(epoch_total / static_cast<double>(batches));
  }
  log.final_loss = mean_loss(backend, pairs);
  return log;
}

std::vector<SyntheticQuestion> generate_slot_questions(
    const GeneratorBackend& backend, const corpus::Dialog& dialog, int slot,
    std::span<const mining::CandidateAnswer> candidates, const DecodeConfig& decode,
    std::size_t input_budget, std::size_t first_order) {
  std::vector<SyntheticQuestion> out;
  const auto history = dialog.history_questions(slot + 1);
  std::size_t order = first_order;
  for (const auto& candidate : candidates) {
    const auto input = serialize_generator_input(*dialog.document, history, candidate.text,
                                                 candidate.char_span, input_budget);
    std::string text = backend.generate(input, decode);
    const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char c) {
      return std::isspace(c) != 0;
    });
    if (blank) continue;
    SyntheticQuestion q;
    q.text = std::move(text);
    q.slot = slot;
    q.candidate = candidate;
    q.order = order++;
    out.push_back(std::move(q));
  }
  return out;
}

QuestionPool build_pool(const corpus::Dialog& dialog, int k,
                        std::span<const SyntheticQuestion> all_slots) {
  QuestionPool pool;
  pool.dialog_id = dialog.dialog_id;
  pool.k = k;
  pool.real = dialog.history_questions(k);
  for (const auto& q : all_slots) {
    if (q.slot >= 0 && q.slot < k) pool.synthetic.push_back(q);
  }
  return pool;
}

nlohmann::json to_json(const SyntheticQuestion& q, const std::string& dialog_id) {
  nlohmann::json j = {{"dialog_id", dialog_id},
                      {"slot", q.slot},
                      {"text", q.text},
                      {"candidate_text", q.candidate.text},
                      {"candidate_begin", q.candidate.char_span.begin},
                      {"candidate_end", q.candidate.char_span.end},
                      {"candidate_sentence", q.candidate.source_sentence},
                      {"order", q.order}};
  if (q.score) j["score"] = *q.score;
  return j;
}

SyntheticQuestion synthetic_from_json(const nlohmann::json& j) {
  try {
    SyntheticQuestion q;
    q.text = j.at("text").get<std::string>();
    q.slot = j.at("slot").get<int>();
    q.candidate.text = j.at("candidate_text").get<std::string>();
    q.candidate.char_span = {j.at("candidate_begin").get<std::size_t>(),
                             j.at("candidate_end").get<std::size_t>()};
    q.candidate.source_sentence = j.value("candidate_sentence", std::size_t{0});
    q.candidate.slot = q.slot;
    q.order = j.value("order", std::size_t{0});
    if (j.contains("score")) q.score = j.at("score").get<double>();
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("synthetic question: ") + e.what());
  }
}

}  // namespace cotah::qg
