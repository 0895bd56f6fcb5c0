#include "cotah/mining.hpp"

namespace cotah::mining {
namespace {

bool is_determiner(const std::string& tag) { return tag == "DT"; }
bool is_adjective(const std::string& tag) {
  return tag == "JJ" || tag == "JJR" || tag == "JJS";
}
bool is_noun(const std::string& tag) {
  return tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "NNPS";
}

}  // namespace

std::vector<PhraseSpan> extract_noun_phrases(std::span<const TaggedToken> tokens) {
  std::vector<PhraseSpan> phrases;
  const std::size_t n = tokens.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    if (is_determiner(tokens[j].tag)) ++j;
    while (j < n && is_adjective(tokens[j].tag)) ++j;
    const std::size_t nouns_begin = j;
    while (j < n && is_noun(tokens[j].tag)) ++j;
    if (j > nouns_begin) {
      phrases.push_back({i, j});
      i = j;
    } else {
      ++i;
    }
  }
  return phrases;
}

}  // namespace cotah::mining
