#pragma once
// Conversational question generation: generator input layout, training
// and decoding through a pluggable sequence-to-sequence backend, per-slot
// synthetic questions, question pools, and generation metrics.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotah/corpus.hpp"
#include "cotah/mining.hpp"
#include "json.hpp"

namespace cotah::qg {

inline constexpr std::string_view kAnswerMarker = "[ANSWER]";
inline constexpr std::string_view kHistoryMarker = "[HISTORY]";
inline constexpr std::string_view kSepMarker = "[SEP]";
inline constexpr std::string_view kDocMarker = "[DOC]";

using TokenSeq = std::vector<std::string>;

// [ANSWER] answer [HISTORY] q_0 [SEP] q_1 ... [DOC] window, where the
// window is the document tokens centred on the answer's sentence and cut
// symmetrically to fit `budget` tokens overall.  Without `answer_span` the
// answer is located by exact search; a miss throws ValidationError.
TokenSeq serialize_generator_input(const corpus::Document& doc,
                                   std::span<const std::string> history,
                                   std::string_view answer,
                                   std::optional<CharSpan> answer_span,
                                   std::size_t budget);

struct TrainingPair {
  TokenSeq input;
  TokenSeq target;  // question tokens, no end marker
};

struct DecodeConfig {
  std::size_t max_new_tokens = 32;  // greedy decoding
};

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string name() const = 0;
  // Called once with the full training set before the first step (builds
  // vocabularies, initialises weights).
  virtual void prepare(std::span<const TrainingPair> pairs, std::uint64_t seed) = 0;
  // Teacher-forced cross-entropy per target token, end marker included.
  virtual double loss(const TrainingPair& pair) const = 0;
  // One optimiser step on the batch; returns the batch loss before the step.
  virtual double train_step(std::span<const TrainingPair> batch) = 0;
  // Greedy decoding; read-only and safe to call concurrently.
  virtual std::string generate(const TokenSeq& input, const DecodeConfig& config) const = 0;
  virtual nlohmann::json save() const = 0;
  virtual void load(const nlohmann::json& checkpoint) = 0;
};

struct QgTrainConfig {
  int epochs = 30;
  std::size_t batch_size = 8;
  std::size_t input_budget = 192;
  std::uint64_t seed = 1000;
};

struct QgTrainLog {
  double initial_loss = 0.0;  // mean over all pairs before training
  double final_loss = 0.0;    // mean over all pairs after training
  std::vector<double> epoch_loss;
  std::size_t pairs = 0;
};

// One pair per turn: serialize(D, H_k, a_k) -> q_k.
std::vector<TrainingPair> build_training_pairs(std::span<const corpus::Dialog> dialogs,
                                               std::size_t budget);
double mean_loss(const GeneratorBackend& backend, std::span<const TrainingPair> pairs);
QgTrainLog train_cqg(GeneratorBackend& backend, std::span<const corpus::Dialog> dialogs,
                     const QgTrainConfig& config);

// Small neural generator: bag-of-embeddings encoder (whole input and the
// answer segment separately) feeding a one-layer tanh decoder conditioned
// on the previous token and position.  Trained with Adam.
struct NeuralGeneratorOptions {
  std::size_t hidden = 32;
  std::size_t max_input_vocab = 8000;
  std::size_t max_output_vocab = 4000;
  std::size_t max_positions = 40;
  double learning_rate = 0.01;
};
std::unique_ptr<GeneratorBackend> make_neural_generator(NeuralGeneratorOptions options = {});

// Deterministic template backend: "what about <answer> ?".  Training is a
// no-op; used for pipeline smoke runs.
std::unique_ptr<GeneratorBackend> make_template_generator();

std::unique_ptr<GeneratorBackend> make_generator(std::string_view kind,
                                                 NeuralGeneratorOptions options = {});

struct SyntheticQuestion {
  std::string text;
  int slot = 0;  // sits between real turns slot and slot + 1
  mining::CandidateAnswer candidate;
  std::optional<double> score;
  std::size_t order = 0;  // generation order within the dialog
};

// One question per candidate, with history q_0..q_slot.  Empty generations
// are dropped.  `first_order` seeds SyntheticQuestion::order.
std::vector<SyntheticQuestion> generate_slot_questions(
    const GeneratorBackend& backend, const corpus::Dialog& dialog, int slot,
    std::span<const mining::CandidateAnswer> candidates, const DecodeConfig& decode,
    std::size_t input_budget, std::size_t first_order = 0);

struct QuestionPool {
  std::string dialog_id;
  int k = 0;
  std::vector<std::string> real;               // q_0 .. q_{k-1}
  std::vector<SyntheticQuestion> synthetic;    // slots < k
};

QuestionPool build_pool(const corpus::Dialog& dialog, int k,
                        std::span<const SyntheticQuestion> all_slots);

nlohmann::json to_json(const SyntheticQuestion& q, const std::string& dialog_id);
SyntheticQuestion synthetic_from_json(const nlohmann::json& j);

struct QgScores {
  double bleu1 = 0.0;
  double bleu4 = 0.0;
  double rouge_l = 0.0;
};

// Corpus BLEU-1/4 with brevity penalty (orders >= 2 smoothed by adding
// epsilon to zero match counts) and mean ROUGE-L F1, all on a 0-100 scale.
QgScores qg_metrics(std::span<const std::string> references,
                    std::span<const std::string> hypotheses);

}  // namespace cotah::qg
