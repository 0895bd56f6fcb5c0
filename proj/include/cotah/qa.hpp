#pragma once
// Extractive reader training with history consistency.  Each turn is read
// twice, once with its real history and once with the augmented history;
// the loss is cross-entropy on the real pass plus lambda times
// KL(p_real || p_aug), where p_real is held constant so the consistency
// gradient reaches the parameters only through the augmented pass.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotah/corpus.hpp"
#include "cotah/selector.hpp"
#include "cotah/util.hpp"
#include "json.hpp"

namespace cotah::qa {

inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kNoAnswerToken = "[NOANSWER]";
inline constexpr double kProbabilityFloor = 1e-12;

// Start/end distributions over the answer positions of one reader input:
// the included document tokens followed by the no-answer sentinel.
struct AnswerDistribution {
  std::vector<double> start;
  std::vector<double> end;

  std::size_t size() const { return start.size(); }
  std::size_t sentinel() const { return start.size() - 1; }
};

// Inclusive answer-position range; (sentinel, sentinel) means no answer.
struct AnswerSpan {
  std::size_t start_pos = 0;
  std::size_t end_pos = 0;
  friend bool operator==(const AnswerSpan&, const AnswerSpan&) = default;
};

// Token layout: h_0 [SEP] h_1 [SEP] ... q [SEP] d_0 ... d_{n-1} [NOANSWER].
struct ReaderInput {
  std::vector<std::string> tokens;
  std::size_t history_kept = 0;     // newest history entries that fit
  std::size_t question_begin = 0;   // token range of the current question
  std::size_t question_end = 0;
  std::size_t doc_begin = 0;        // first document token in `tokens`
  std::vector<CharSpan> doc_spans;  // character span of each included doc token

  std::size_t doc_len() const { return doc_spans.size(); }
  std::size_t answer_positions() const { return doc_spans.size() + 1; }
  std::size_t sentinel_token() const { return doc_begin + doc_spans.size(); }
  // Empty optional for the sentinel.
  std::optional<CharSpan> char_span(AnswerSpan span) const;
  std::string span_text(const corpus::Document& doc, AnswerSpan span) const;
  // Position range covering `chars`, or nullopt if outside the window.
  std::optional<AnswerSpan> locate(CharSpan chars) const;
};

// Drops the oldest history first, then the document tail, to fit `budget`.
// Throws ValidationError when the question, separator and sentinel alone
// exceed it.
ReaderInput serialize_reader_input(std::string_view question,
                                   std::span<const std::string> history,
                                   const corpus::Document& doc, std::size_t budget);

// Mean over heads of -log p[gold], probabilities floored at 1e-12.
double ce_loss(const AnswerDistribution& dist, const AnswerSpan& gold);
// Mean over heads of KL(real || aug).
double consistency_loss(const AnswerDistribution& real, const AnswerDistribution& aug);
// l_ce + lambda * l_cons when k >= tau, else l_ce.
double total_loss(double l_ce, double l_cons, double lambda, int k, int tau);

// argmax start[s] * end[e] over document pairs s <= e < s + max_answer_len
// and the sentinel pair; ties go to the smallest s, then the smallest e.
AnswerSpan decode_span(const AnswerDistribution& dist, std::size_t max_answer_len);

struct Logits {
  std::vector<double> start;
  std::vector<double> end;
};

AnswerDistribution to_distribution(const Logits& logits);

class ReaderBackend {
 public:
  virtual ~ReaderBackend() = default;
  virtual std::string name() const = 0;
  // Evaluation-mode logits; never touches gradients.
  virtual Logits logits(const ReaderInput& input) const = 0;
  // Accumulates d loss / d params given d loss / d logits of one input.
  virtual void backward(const ReaderInput& input, const Logits& dlogits) = 0;
  virtual std::span<double> parameters() = 0;
  virtual std::span<const double> parameters() const = 0;
  virtual std::span<double> gradients() = 0;
  virtual nlohmann::json save() const = 0;
  virtual void load(const nlohmann::json& checkpoint) = 0;
  // Seeded N(0, scale^2) weights.
  virtual void initialize(std::uint64_t seed, double scale) = 0;

  AnswerDistribution forward(const ReaderInput& input) const {
    return to_distribution(logits(input));
  }
  void zero_grad();
};

// Per-position features shared by both heads:
//   0 token occurs in the current question
//   1 token occurs in a history question
//   2 sentinel indicator
//   3 share of the +/-3 neighbourhood that occurs in the question
//   4 token starts with an uppercase letter or digit
// logit_start = w_start . phi, logit_end = w_end . phi.
class LinearSpanReader final : public ReaderBackend {
 public:
  static constexpr std::size_t kMaxFeatures = 5;

  explicit LinearSpanReader(std::size_t num_features = kMaxFeatures);

  std::string name() const override { return "linear"; }
  Logits logits(const ReaderInput& input) const override;
  void backward(const ReaderInput& input, const Logits& dlogits) override;
  std::span<double> parameters() override { return params_; }
  std::span<const double> parameters() const override { return params_; }
  std::span<double> gradients() override { return grads_; }
  nlohmann::json save() const override;
  void load(const nlohmann::json& checkpoint) override;

  std::size_t num_features() const { return features_; }
  // Row-major [answer_positions x num_features].
  std::vector<double> features(const ReaderInput& input) const;
  void initialize(std::uint64_t seed, double scale) override;

 private:
  std::size_t features_;
  std::vector<double> params_;  // [w_start | w_end]
  std::vector<double> grads_;
};

std::unique_ptr<ReaderBackend> make_reader(std::string_view kind);

struct TrainConfig {
  std::size_t S = 2;
  double lambda = 2.0;
  int tau = 6;
  std::uint64_t seed = 1000;
  std::size_t max_answer_len = 30;
  std::size_t input_budget = 384;
  std::size_t batch_size = 8;
  double learning_rate = 0.05;
  int epochs = 3;
  double init_scale = 1.0;
};

struct LossBreakdown {
  double l_ce = 0.0;
  double l_cons = 0.0;
  double l_total = 0.0;
};

struct TrainExample {
  std::string dialog_id;
  int k = 0;
  ReaderInput input_real;
  std::optional<ReaderInput> input_aug;  // only for augmented turns
  AnswerSpan gold;
};

struct StepResult {
  std::vector<LossBreakdown> examples;
  LossBreakdown mean;
  std::size_t forward_passes = 0;
};

// Forward/backward over the batch without the optimiser step; gradients are
// left in reader.gradients().
StepResult accumulate_gradients(ReaderBackend& reader, std::span<const TrainExample> batch,
                                const TrainConfig& config);

// One optimiser step over the batch.  Cross-entropy gradients come from the
// real-history pass; consistency gradients only from the augmented pass.
// Examples with k < tau (or without an augmented input) skip the second
// forward and report l_cons = 0.
StepResult train_step(ReaderBackend& reader, std::span<const TrainExample> batch,
                      const TrainConfig& config, util::Adam& optimizer);

struct StepRecord {
  int epoch = 0;
  std::size_t step = 0;
  std::string dialog_id;
  int k = 0;
  LossBreakdown loss;
};

struct EpochRecord {
  int epoch = 0;
  std::size_t examples = 0;
  std::size_t augmented = 0;
  double mean_l_ce = 0.0;
  double mean_l_cons = 0.0;       // over augmented examples
  double mean_l_total = 0.0;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;
  std::vector<StepRecord> steps;
  std::size_t skipped = 0;  // gold answer outside the document window
};

// Augmented history for (dialog, k) in a given epoch; nullopt when the
// provider has none.
using HistoryProvider = std::function<std::optional<selector::AugmentedHistory>(
    const corpus::Dialog& dialog, int k, int epoch)>;

// Epoch loop over every turn of every dialog, shuffled per epoch from the
// seed.  Turns with k >= tau need an augmented history when S > 0 and
// lambda > 0; a missing one throws ValidationError.
TrainingLog train_qa(ReaderBackend& reader, std::span<const corpus::Dialog> dialogs,
                     const HistoryProvider& histories, const TrainConfig& config);

// Gold answer positions for a turn in a reader input; sentinel when
// unanswerable, nullopt when the answer lies outside the window.
std::optional<AnswerSpan> gold_span(const corpus::Turn& turn, const ReaderInput& input);

nlohmann::json to_json(const EpochRecord& e);
nlohmann::json to_json(const StepRecord& s);

}  // namespace cotah::qa
