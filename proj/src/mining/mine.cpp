#include <algorithm>
#include <set>

#include "cotah/eval.hpp"
#include "cotah/mining.hpp"

namespace cotah::mining {

std::vector<CandidateAnswer> mine_candidates(const corpus::Dialog& dialog, int turn_j,
                                             const PosTagger& tagger,
                                             const MiningConfig& config) {
  std::vector<CandidateAnswer> out;
  if (turn_j < 0 || turn_j >= static_cast<int>(dialog.turns.size())) return out;
  const corpus::Turn& turn = dialog.turns[turn_j];
  const corpus::GoldAnswer& gold = turn.gold_answers.front();
  if (gold.unanswerable) return out;

  const corpus::Document& doc = *dialog.document;
  const std::size_t i = corpus::locate_answer_sentence(doc, gold.char_span);
  const std::size_t first = i == 0 ? 0 : i - 1;
  const std::size_t last = std::min(i + 1, doc.sentences.size() - 1);

  std::set<std::string> seen;
  seen.insert(eval::normalize_text(gold.text));
  for (std::size_t s = first; s <= last && out.size() < config.max_candidates; ++s) {
    const CharSpan sentence = doc.sentences[s];
    const auto tokens = corpus::tokenize(doc.slice(sentence), sentence.begin);
    const auto tags = tagger.tag(tokens);
    std::vector<TaggedToken> tagged;
    tagged.reserve(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) tagged.push_back({tokens[t].text, tags[t]});

    for (const PhraseSpan& np : extract_noun_phrases(tagged)) {
      const CharSpan span{tokens[np.begin].span.begin, tokens[np.end - 1].span.end};
      std::string text(doc.slice(span));
      const std::string key = eval::normalize_text(text);
      if (key.empty() || !seen.insert(key).second) continue;
      out.push_back({std::move(text), span, s, turn_j});
      if (out.size() >= config.max_candidates) break;
    }
  }
  return out;
}

nlohmann::json to_json(const CandidateAnswer& c, const std::string& dialog_id) {
  return {{"dialog_id", dialog_id},
          {"slot", c.slot},
          {"text", c.text},
          {"begin", c.char_span.begin},
          {"end", c.char_span.end},
          {"source_sentence", c.source_sentence}};
}

CandidateAnswer candidate_from_json(const nlohmann::json& j) {
  try {
    return {j.at("text").get<std::string>(),
            {j.at("begin").get<std::size_t>(), j.at("end").get<std::size_t>()},
            j.at("source_sentence").get<std::size_t>(),
            j.at("slot").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("candidate: ") + e.what());
  }
}

}  // namespace cotah::mining
