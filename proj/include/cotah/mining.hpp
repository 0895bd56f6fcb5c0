#pragma once
// Candidate answers for synthetic questions: noun phrases mined from the
// sentence holding a real answer and its two neighbours.

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cotah/corpus.hpp"
#include "json.hpp"

namespace cotah::mining {

// Penn Treebank tags.  Chunking only looks at DT, JJ/JJR/JJS and
// NN/NNS/NNP/NNPS; any other string is a non-matching tag.
struct TaggedToken {
  std::string word;
  std::string tag;
};

// Token range [begin, end).
struct PhraseSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const PhraseSpan&, const PhraseSpan&) = default;
};

// Maximal, non-overlapping matches of DT? JJ* NN+, left to right.
std::vector<PhraseSpan> extract_noun_phrases(std::span<const TaggedToken> tokens);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  // One tag per token of a single sentence.
  virtual std::vector<std::string> tag(std::span<const corpus::Token> sentence) const = 0;
};

// Dictionary lookup on the lowercased word.  Misses fall back to shape
// rules (digits, capitalisation, common suffixes) unless disabled.
class LexiconTagger final : public PosTagger {
 public:
  explicit LexiconTagger(std::map<std::string, std::string> lexicon,
                         bool shape_fallback = true);

  // Closed-class English words and frequent verbs/adjectives.
  static LexiconTagger builtin();
  // Builtin entries overlaid with a "word<TAB>TAG" file.
  static LexiconTagger with_file(const std::filesystem::path& path);

  std::vector<std::string> tag(std::span<const corpus::Token> sentence) const override;

 private:
  std::string guess(const corpus::Token& token) const;

  std::map<std::string, std::string> lexicon_;
  bool shape_fallback_;
};

struct CandidateAnswer {
  std::string text;
  CharSpan char_span;
  std::size_t source_sentence = 0;
  int slot = 0;
  friend bool operator==(const CandidateAnswer&, const CandidateAnswer&) = default;
};

struct MiningConfig {
  std::size_t max_candidates = 20;
};

// Noun phrases from sentences i-1, i, i+1 around the answer of turn j, in
// document order, deduplicated by normalized text and excluding the gold
// answer itself.  Unanswerable turns yield nothing.
std::vector<CandidateAnswer> mine_candidates(const corpus::Dialog& dialog, int turn_j,
                                             const PosTagger& tagger,
                                             const MiningConfig& config = {});

nlohmann::json to_json(const CandidateAnswer& c, const std::string& dialog_id);
CandidateAnswer candidate_from_json(const nlohmann::json& j);

}  // namespace cotah::mining
