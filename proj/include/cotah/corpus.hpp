#pragma once
// QuAC-format dialogs: loading and validation, sentence segmentation,
// tokenization with character offsets, and dialog-level dev/test splits.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cotah/common.hpp"
#include "json.hpp"

namespace cotah::corpus {

// QuAC's literal for "no answer in the document".
inline constexpr std::string_view kCannotAnswer = "CANNOTANSWER";

struct Document {
  std::string doc_id;
  std::string text;
  // Sorted, non-overlapping, covering every non-whitespace character.
  std::vector<CharSpan> sentences;

  std::string_view slice(CharSpan span) const {
    return std::string_view(text).substr(span.begin, span.size());
  }
};

struct GoldAnswer {
  std::string text;
  CharSpan char_span;
  bool unanswerable = false;
};

struct Turn {
  int turn_index = 0;
  std::string qa_id;
  std::string question;
  std::vector<GoldAnswer> gold_answers;  // non-empty; [0] is the training target
  double human_f1 = 1.0;

  std::vector<std::string> reference_texts() const;
};

struct Dialog {
  std::string dialog_id;
  std::shared_ptr<const Document> document;
  std::vector<Turn> turns;

  // Real questions q_0 .. q_{k-1}.
  std::vector<std::string> history_questions(int k) const;
};

struct Split {
  std::uint64_t seed = 0;
  std::vector<std::string> dev_dialog_ids;   // sorted
  std::vector<std::string> test_dialog_ids;  // sorted
  friend bool operator==(const Split&, const Split&) = default;
};

class SentenceSegmenter {
 public:
  virtual ~SentenceSegmenter() = default;
  virtual std::vector<CharSpan> segment(std::string_view text) const = 0;
};

// Breaks after [.?!] (plus closing quotes or brackets) when followed by
// whitespace and an uppercase letter, digit or opening quote.  Known
// abbreviations such as "Mr." or "U.S." do not end a sentence.
class RuleSegmenter final : public SentenceSegmenter {
 public:
  std::vector<CharSpan> segment(std::string_view text) const override;
};

std::vector<CharSpan> segment_sentences(std::string_view text);

struct Token {
  std::string text;
  CharSpan span;
};

// Words (letters/digits with inner apostrophes, hyphens or periods) and
// single punctuation characters.  Spans are offset by `base`.
std::vector<Token> tokenize(std::string_view text, std::size_t base = 0);

// Index of the sentence holding span.begin.  Throws ValidationError when
// the span falls outside the document.
std::size_t locate_answer_sentence(const Document& doc, CharSpan span);

std::vector<Dialog> parse_corpus(const nlohmann::json& root,
                                 const SentenceSegmenter& segmenter);
std::vector<Dialog> load_corpus(const std::filesystem::path& path);
std::vector<Dialog> load_corpus(const std::filesystem::path& path,
                                const SentenceSegmenter& segmenter);

// Shuffle with `seed`, assign each dialog to the side with fewer questions
// so far, then apply balancing moves/swaps while they shrink the gap.
Split split_dev_test(std::span<const Dialog> dialogs, std::uint64_t seed);

nlohmann::json to_json(const Split& split);
Split split_from_json(const nlohmann::json& j);
// Stable identifier of a dialog-id set, used to match evaluation reports.
std::string dialog_set_digest(std::span<const std::string> dialog_ids);

// Synthetic QuAC-format corpus with consistent spans.  Dialog lengths lie in
// [min_turns, max_turns].
nlohmann::json make_toy_quac(int num_dialogs, std::uint64_t seed,
                             int min_turns = 6, int max_turns = 10);

}  // namespace cotah::corpus
