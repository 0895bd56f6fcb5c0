#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "cotah/mining.hpp"
#include "cotah/util.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cotah;
using mining::PhraseSpan;
using mining::TaggedToken;

namespace {

std::vector<TaggedToken> tagged(std::initializer_list<std::pair<const char*, const char*>> xs) {
  std::vector<TaggedToken> out;
  for (const auto& [w, t] : xs) out.push_back({w, t});
  return out;
}

std::vector<std::string> phrase_texts(const std::vector<TaggedToken>& toks,
                                      const std::vector<PhraseSpan>& spans) {
  std::vector<std::string> out;
  for (const auto& s : spans) {
    std::string text;
    for (std::size_t i = s.begin; i < s.end; ++i) text += (i > s.begin ? " " : "") + toks[i].word;
    out.push_back(text);
  }
  return out;
}

bool matches_pattern(const std::vector<std::string>& tags, std::size_t b, std::size_t e) {
  auto is = [&](std::size_t i, std::initializer_list<const char*> set) {
    return std::any_of(set.begin(), set.end(), [&](const char* t) { return tags[i] == t; });
  };
  std::size_t i = b;
  if (i < e && is(i, {"DT"})) ++i;
  while (i < e && is(i, {"JJ", "JJR", "JJS"})) ++i;
  const std::size_t nouns = i;
  while (i < e && is(i, {"NN", "NNS", "NNP", "NNPS"})) ++i;
  return i == e && e > nouns;
}

// All pattern matches that are not strictly inside another match.
std::vector<PhraseSpan> oracle_phrases(const std::vector<std::string>& tags) {
  std::vector<PhraseSpan> all;
  for (std::size_t b = 0; b < tags.size(); ++b) {
    for (std::size_t e = b + 1; e <= tags.size(); ++e) {
      if (matches_pattern(tags, b, e)) all.push_back({b, e});
    }
  }
  std::vector<PhraseSpan> maximal;
  for (const auto& p : all) {
    const bool inside = std::any_of(all.begin(), all.end(), [&](const PhraseSpan& q) {
      return q.begin <= p.begin && p.end <= q.end && !(q == p);
    });
    if (!inside) maximal.push_back(p);
  }
  return maximal;
}

// Tags every token from a fixed dictionary; misses get "UNK".
mining::LexiconTagger dictionary_tagger() {
  return mining::LexiconTagger(
      {{"the", "DT"},   {"a", "DT"},       {"band", "NN"},     {"formed", "VBD"},
       {"in", "IN"},    {"boston", "NNP"}, {"they", "PRP"},    {"released", "VBD"},
       {"blue", "JJ"},  {"album", "NN"},   {"tour", "NN"},     {"followed", "VBD"},
       {"long", "JJ"},  {"europe", "NNP"}, {"it", "PRP"},      {"was", "VBD"},
       {"success", "NN"}, {"critics", "NNS"}, {"praised", "VBD"}, {"singer", "NN"},
       {"left", "VBD"}, {"group", "NN"},   {"later", "RB"},    {"and", "CC"}},
      false);
}

}  // namespace

TEST_CASE("extract_noun_phrases examples") {
  const auto car = tagged({{"the", "DT"}, {"red", "JJ"}, {"car", "NN"}, {"stopped", "VBD"}});
  CHECK(phrase_texts(car, mining::extract_noun_phrases(car)) ==
        std::vector<std::string>{"the red car"});
  const auto none = tagged({{"run", "VB"}, {"quickly", "RB"}, {"now", "RB"}});
  CHECK(mining::extract_noun_phrases(none).empty());
  const auto names = tagged({{"John", "NNP"}, {"met", "VBD"}, {"Mary", "NNP"}});
  CHECK(phrase_texts(names, mining::extract_noun_phrases(names)) ==
        std::vector<std::string>{"John", "Mary"});
  const auto unknown = tagged({{"x", "??"}, {"dog", "NN"}});
  CHECK(mining::extract_noun_phrases(unknown) == std::vector<PhraseSpan>{{1, 2}});
  const auto dangling = tagged({{"the", "DT"}, {"big", "JJ"}, {"the", "DT"}, {"dog", "NN"}});
  CHECK(mining::extract_noun_phrases(dangling) == std::vector<PhraseSpan>{{2, 4}});
}

TEST_CASE("extract_noun_phrases returns exactly the maximal matches on random tag strings") {
  const std::vector<std::string> tagset = {"DT", "JJ", "JJS", "NN", "NNS", "NNP",
                                           "VB", "IN", "RB", "XX"};
  util::Rng rng(31);
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<TaggedToken> toks;
    std::vector<std::string> tags;
    const auto n = rng.below(12);
    for (std::uint64_t i = 0; i < n; ++i) {
      tags.push_back(tagset[rng.below(tagset.size())]);
      toks.push_back({"w" + std::to_string(i), tags.back()});
    }
    CAPTURE(tags);
    CHECK(mining::extract_noun_phrases(toks) == oracle_phrases(tags));
  }
}

TEST_CASE("LexiconTagger dictionary, shape fallback and override file") {
  const auto doc = fixtures::document("The Beatles played 12 songs loudly in Hamburg.");
  const auto toks = corpus::tokenize(doc->text);
  const auto tags = mining::LexiconTagger::builtin().tag(toks);
  REQUIRE(tags.size() == toks.size());
  CHECK(tags[0] == "DT");
  CHECK(tags[1] == "NNP");
  CHECK(tags[3] == "CD");
  CHECK(tags[4] == "NNS");
  CHECK(tags[5] == "RB");
  CHECK(tags[7] == "NNP");
  CHECK(tags.back() == ".");

  const auto path = std::filesystem::temp_directory_path() / "cotah_lexicon.tsv";
  std::ofstream(path) << "# extra\nloudly\tJJ\n";
  const auto custom = mining::LexiconTagger::with_file(path).tag(toks);
  CHECK(custom[5] == "JJ");
  std::ofstream(path) << "broken line\n";
  CHECK_THROWS_AS(mining::LexiconTagger::with_file(path), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("mine_candidates draws from the three-sentence window") {
  auto doc = fixtures::document(
      "The band formed in Boston. They released a blue album. A long tour followed in Europe. "
      "It was a success. Critics praised the singer. The singer left the group later.");
  REQUIRE(doc->sentences.size() == 6);
  corpus::Dialog d;
  d.dialog_id = "d";
  d.document = doc;
  d.turns.push_back(fixtures::turn(*doc, 0, "Where did they form?", "Boston"));
  d.turns.push_back(fixtures::turn(*doc, 1, "What happened next?", "a success"));
  d.turns.push_back(fixtures::turn(*doc, 2, "Did they split?", ""));
  d.turns.push_back(fixtures::turn(*doc, 3, "Who left?", "The singer left"));
  const auto tagger = dictionary_tagger();

  SUBCASE("answer in sentence 0 reads sentences 0 and 1") {
    const auto c = mining::mine_candidates(d, 0, tagger);
    std::vector<std::string> texts;
    for (const auto& x : c) {
      CHECK(x.source_sentence <= 1);
      CHECK(x.slot == 0);
      texts.push_back(x.text);
    }
    // "Boston" is the gold answer of the turn and is excluded.
    CHECK(texts == std::vector<std::string>{"The band", "a blue album"});
  }
  SUBCASE("answer in the middle reads exactly i-1, i, i+1") {
    const auto c = mining::mine_candidates(d, 1, tagger);
    std::set<std::size_t> sources;
    for (const auto& x : c) sources.insert(x.source_sentence);
    CHECK(sources == std::set<std::size_t>{2, 4});
    std::vector<std::string> texts;
    for (const auto& x : c) texts.push_back(x.text);
    CHECK(texts == std::vector<std::string>{"A long tour", "Europe", "Critics", "the singer"});
  }
  SUBCASE("last sentence clamps and duplicate phrases collapse") {
    const auto c = mining::mine_candidates(d, 3, tagger);
    std::vector<std::string> texts;
    for (const auto& x : c) {
      CHECK(x.source_sentence >= 4);
      texts.push_back(x.text);
    }
    // "the singer" (sentence 4) and "The singer" (sentence 5) normalize alike.
    CHECK(texts == std::vector<std::string>{"Critics", "the singer", "the group"});
  }
  SUBCASE("unanswerable turns yield nothing") {
    CHECK(mining::mine_candidates(d, 2, tagger).empty());
  }
  SUBCASE("cap and round trip") {
    const auto capped = mining::mine_candidates(d, 1, tagger, {2});
    CHECK(capped.size() == 2);
    for (const auto& x : mining::mine_candidates(d, 1, tagger)) {
      CHECK(doc->slice(x.char_span) == x.text);
      CHECK(mining::candidate_from_json(mining::to_json(x, "d")) == x);
    }
  }
}

TEST_CASE("mined candidates round-trip and stay in the window on the toy corpus") {
  const auto dialogs =
      corpus::parse_corpus(corpus::make_toy_quac(15, 3), corpus::RuleSegmenter{});
  const auto tagger = mining::LexiconTagger::builtin();
  std::size_t total = 0;
  for (const auto& d : dialogs) {
    for (int j = 0; j + 1 < static_cast<int>(d.turns.size()); ++j) {
      const auto c = mining::mine_candidates(d, j, tagger);
      const auto& gold = d.turns[j].gold_answers.front();
      if (gold.unanswerable) {
        CHECK(c.empty());
        continue;
      }
      const std::size_t i = corpus::locate_answer_sentence(*d.document, gold.char_span);
      for (const auto& x : c) {
        CHECK(d.document->slice(x.char_span) == x.text);
        CHECK(x.source_sentence + 1 >= i);
        CHECK(x.source_sentence <= i + 1);
      }
      CHECK(std::is_sorted(c.begin(), c.end(), [](const auto& a, const auto& b) {
        return a.char_span.begin < b.char_span.begin;
      }));
      CHECK(c.size() <= 20);
      total += c.size();
    }
  }
  CHECK(total > 0);
}
