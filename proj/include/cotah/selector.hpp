#pragma once
// Question selection: score synthetic questions against their neighbouring
// real turns, discard near-duplicates of real questions, keep the top M and
// sample S of them into the augmented history.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotah/qg.hpp"
#include "cotah/util.hpp"
#include "json.hpp"

namespace cotah::selector {

using Embedding = std::vector<double>;

class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;
  virtual std::size_t dim() const = 0;
  // Deterministic; non-zero for non-empty text.
  virtual Embedding encode(std::string_view text) const = 0;
};

// Signed feature hashing of lowercased words and character trigrams.
class HashingEncoder final : public SentenceEncoder {
 public:
  explicit HashingEncoder(std::size_t dim = 256);
  std::size_t dim() const override { return dim_; }
  Embedding encode(std::string_view text) const override;

 private:
  std::size_t dim_;
};

// Precomputed vectors keyed by exact text, e.g. exported from a pretrained
// multilingual sentence encoder.  JSONL rows {"text": ..., "vector": [...]};
// encoding unknown text throws.
class TableEncoder final : public SentenceEncoder {
 public:
  explicit TableEncoder(std::map<std::string, Embedding> table);
  static TableEncoder from_jsonl(const std::filesystem::path& path);
  std::size_t dim() const override { return dim_; }
  Embedding encode(std::string_view text) const override;

 private:
  std::map<std::string, Embedding, std::less<>> table_;
  std::size_t dim_ = 0;
};

std::unique_ptr<SentenceEncoder> make_encoder(std::string_view kind, std::size_t dim,
                                              const std::filesystem::path& table_path);

// dot(u, v) / (|u| |v|); throws ValidationError on a zero vector or a
// dimension mismatch.
double cosine_sim(std::span<const double> u, std::span<const double> v);

// Sim(q_j, q_syn) + Sim(q_{j+1}, q_syn).
double score_synthetic(const qg::SyntheticQuestion& q_syn, std::string_view q_j,
                       std::string_view q_j1, const SentenceEncoder& encoder);

// Scores every synthetic question of the pool; the right neighbour of the
// last slot is the current question.
qg::QuestionPool score_pool(qg::QuestionPool pool, std::string_view current_question,
                            const SentenceEncoder& encoder);

// Drops synthetic questions whose highest similarity to {current} U history
// is strictly above gamma.
qg::QuestionPool filter_similar(qg::QuestionPool pool, std::string_view current_question,
                                double gamma, const SentenceEncoder& encoder);

// Keeps the m best-scoring synthetic questions (ties: lower slot, then
// earlier generation).  Throws ValidationError on an unscored question.
qg::QuestionPool top_m(qg::QuestionPool pool, std::size_t m);

enum class Distribution { uniform, linear };

Distribution parse_distribution(std::string_view name);
std::string_view distribution_name(Distribution d);

struct SelectionConfig {
  std::size_t M = 10;
  double gamma = 0.8;
  std::size_t S = 2;
  Distribution distribution = Distribution::uniform;
  std::uint64_t seed = 1000;
};

// Weighted draws without replacement: weight 1 (uniform) or k - slot
// (linear).  Pools no larger than S are returned whole.
std::vector<qg::SyntheticQuestion> sample_selection(const qg::QuestionPool& pool, int k,
                                                    const SelectionConfig& config,
                                                    util::Rng& rng);

enum class Origin { real, synthetic };

struct HistoryEntry {
  std::string text;
  Origin origin = Origin::real;
  int slot = 0;
  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct AugmentedHistory {
  std::vector<HistoryEntry> entries;

  std::vector<std::string> questions() const;
  std::size_t size() const { return entries.size(); }
};

// Real questions in order; synthetic entries of slot j follow real entry j,
// best score first.
AugmentedHistory assemble_augmented_history(std::span<const std::string> real_history,
                                            std::span<const qg::SyntheticQuestion> selected);

// Scoring, filtering and top-M for turn k of a dialog.
qg::QuestionPool prepare_pool(const corpus::Dialog& dialog, int k,
                              std::span<const qg::SyntheticQuestion> all_slots,
                              const SelectionConfig& config, const SentenceEncoder& encoder);

// Sampling stream for one turn.
util::Rng turn_rng(std::uint64_t seed, std::string_view stream, std::string_view dialog_id,
                   int k);

nlohmann::json to_json(const AugmentedHistory& h, const std::string& dialog_id, int k);
AugmentedHistory augmented_from_json(const nlohmann::json& j);

}  // namespace cotah::selector
