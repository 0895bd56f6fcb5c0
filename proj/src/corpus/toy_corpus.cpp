#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>

#include "cotah/corpus.hpp"
#include "cotah/util.hpp"

namespace cotah::corpus {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 12> kFirst = {
    "Alice", "Marco", "Ingrid", "Tomas", "Lena", "Oscar",
    "Priya", "Henrik", "Sofia", "Jonas", "Mira", "Felix"};
constexpr std::array<std::string_view, 10> kLast = {
    "Varga", "Holt", "Lindqvist", "Moreau", "Okafor",
    "Brandt", "Castillo", "Novak", "Reyes", "Sato"};
constexpr std::array<std::string_view, 10> kCity = {
    "Paris", "Lisbon", "Oslo", "Vienna", "Chicago",
    "Melbourne", "Toronto", "Prague", "Seville", "Dublin"};
constexpr std::array<std::string_view, 8> kCountry = {
    "Japan", "Brazil", "Norway", "Canada", "Italy", "Kenya", "Chile", "Poland"};
constexpr std::array<std::string_view, 6> kSubject = {
    "music theory", "painting", "architecture", "physics", "literature", "law"};
constexpr std::array<std::string_view, 6> kSchool = {
    "Royal College", "City Conservatory", "Northern Institute",
    "Grand Academy", "Western University", "Harbor School"};
constexpr std::array<std::string_view, 8> kBand = {
    "Silver Lanterns", "The Quiet Hours", "Northbound", "Glass Harbor",
    "Red Meridian", "Paper Kites", "Low Tide", "Iron Orchard"};
constexpr std::array<std::string_view, 8> kAlbum = {
    "Winter Roads", "Open Window", "Second Light", "Stone Garden",
    "Blue Static", "Long Summer", "Hollow Sky", "Night Market"};
constexpr std::array<std::string_view, 5> kAward = {
    "Golden Lyre", "Critics Prize", "National Music Award", "Silver Bell",
    "Composer Medal"};
constexpr std::array<std::string_view, 6> kInstrument = {
    "cello", "piano", "trumpet", "violin", "bass guitar", "drums"};
constexpr std::array<std::string_view, 5> kQuality = {
    "warm", "bright", "restless", "layered", "sparse"};
constexpr std::array<std::string_view, 4> kTexture = {
    "sound", "production", "vocals", "arrangements"};

template <std::size_t N>
std::string pick(util::Rng& rng, const std::array<std::string_view, N>& items) {
  return std::string(items[rng.below(N)]);
}

struct QaItem {
  std::string question;
  std::size_t answer_offset = 0;  // within the sentence
  std::string answer;
  // Looser reference span, also relative to the sentence.
  std::size_t alt_offset = 0;
  std::string alt;
};

struct Fact {
  std::string sentence;
  std::vector<QaItem> qas;
};

class SentenceBuilder {
 public:
  SentenceBuilder& text(std::string_view s) {
    out_ += s;
    return *this;
  }
  std::size_t mark(std::string_view s) {
    const std::size_t at = out_.size();
    out_ += s;
    return at;
  }
  std::string str() const { return out_; }

 private:
  std::string out_;
};

struct Person {
  std::string first;
  std::string full;
  std::string subject;  // "He" / "She"
  std::string object;   // "he" / "she"
  std::string possessive;
};

std::vector<Fact> make_facts(util::Rng& rng, const Person& p) {
  std::vector<Fact> facts;
  {
    SentenceBuilder b;
    b.text(p.full).text(" was born in ");
    const std::string city = pick(rng, kCity);
    const std::size_t c = b.mark(city);
    b.text(" in ");
    const std::string year = std::to_string(1940 + rng.below(40));
    const std::size_t y = b.mark(year);
    b.text(".");
    facts.push_back({b.str(),
                     {{"Where was " + p.first + " born?", c, city, 0, ""},
                      {"When was " + p.first + " born?", y, year, 0, ""}}});
  }
  {
    SentenceBuilder b;
    b.text(p.subject).text(" studied ");
    const std::string subject = pick(rng, kSubject);
    const std::size_t s = b.mark(subject);
    b.text(" at the ");
    const std::string school = pick(rng, kSchool);
    const std::size_t sc = b.mark(school);
    b.text(".");
    facts.push_back({b.str(),
                     {{"What did " + p.object + " study?", s, subject, 0, ""},
                      {"Where did " + p.object + " go to school?", sc, school, sc - 4,
                       "the " + school}}});
  }
  {
    SentenceBuilder b;
    const std::string year = std::to_string(1960 + rng.below(30));
    b.text("In ");
    const std::size_t y = b.mark(year);
    b.text(", ").text(p.object).text(" joined the band ");
    const std::string band = pick(rng, kBand);
    const std::size_t bd = b.mark(band);
    b.text(".");
    facts.push_back({b.str(),
                     {{"What band did " + p.object + " join?", bd, band, 0, ""},
                      {"When did " + p.object + " join " + band + "?", y, year, 0, ""}}});
  }
  {
    SentenceBuilder b;
    b.text("The band released its first album, ");
    const std::string album = pick(rng, kAlbum);
    const std::size_t a = b.mark(album);
    b.text(", in ");
    const std::string year = std::to_string(1970 + rng.below(30));
    const std::size_t y = b.mark(year);
    b.text(".");
    facts.push_back({b.str(),
                     {{"What was the name of their first album?", a, album, 0, ""},
                      {"When was " + album + " released?", y, year, 0, ""}}});
  }
  {
    SentenceBuilder b;
    b.text(p.subject).text(" won the ");
    const std::string award = pick(rng, kAward);
    const std::size_t aw = b.mark(award);
    b.text(" for the song ");
    const std::string song = pick(rng, kAlbum);
    const std::size_t s = b.mark(song);
    b.text(".");
    facts.push_back({b.str(),
                     {{"What award did " + p.object + " win?", aw, award, aw - 4,
                       "the " + award},
                      {"Which song won the award?", s, song, 0, ""}}});
  }
  {
    SentenceBuilder b;
    b.text(p.subject).text(" later moved to ");
    const std::string city = pick(rng, kCity);
    const std::size_t c = b.mark(city);
    b.text(" to work with ");
    const std::string partner = pick(rng, kFirst) + " " + pick(rng, kLast);
    const std::size_t w = b.mark(partner);
    b.text(".");
    facts.push_back({b.str(),
                     {{"Where did " + p.object + " move later?", c, city, 0, ""},
                      {"Who did " + p.object + " work with?", w, partner, 0, ""}}});
  }
  {
    SentenceBuilder b;
    b.text("The tour visited ");
    const std::string c1 = pick(rng, kCountry);
    std::string c2 = pick(rng, kCountry);
    if (c2 == c1) c2 = c1 == "Chile" ? "Japan" : "Chile";
    const std::size_t v = b.mark(c1 + " and " + c2);
    b.text(" during the summer.");
    facts.push_back({b.str(),
                     {{"Which countries did the tour visit?", v, c1 + " and " + c2, v, c1}}});
  }
  {
    SentenceBuilder b;
    b.text("Critics praised the ");
    const std::string q = pick(rng, kQuality) + " " + pick(rng, kTexture);
    const std::size_t at = b.mark(q);
    b.text(" of the record.");
    facts.push_back({b.str(), {{"What did critics praise?", at, q, at - 4, "the " + q}}});
  }
  {
    SentenceBuilder b;
    b.text(p.subject).text(" played the ");
    const std::string inst = pick(rng, kInstrument);
    const std::size_t at = b.mark(inst);
    b.text(" on most recordings.");
    facts.push_back({b.str(),
                     {{"What instrument did " + p.object + " play?", at, inst, 0, ""}}});
  }
  return facts;
}

}  // namespace

json make_toy_quac(int num_dialogs, std::uint64_t seed, int min_turns, int max_turns) {
  const std::array<std::string, 4> fillers = {
      "Little is known about this period.",
      "The details were reported in local newspapers.",
      "Many fans consider this the most productive era.",
      "Several recordings from these sessions were later lost."};
  const std::array<std::string, 3> unanswerable = {
      "Did %s have any children?", "What other interests did %s have?",
      "Was there any controversy?"};

  json articles = json::array();
  for (int d = 0; d < num_dialogs; ++d) {
    util::Rng rng(util::derive_seed(seed, "toy-corpus", "", d));
    Person p;
    p.first = pick(rng, kFirst);
    p.full = p.first + " " + pick(rng, kLast);
    const bool she = rng.below(2) == 0;
    p.subject = she ? "She" : "He";
    p.object = she ? "she" : "he";
    p.possessive = she ? "her" : "his";

    std::vector<Fact> facts = make_facts(rng, p);
    // Birth stays first; the rest appear in shuffled order with fillers.
    std::vector<Fact> rest(facts.begin() + 1, facts.end());
    rng.shuffle(rest);

    std::string context;
    std::vector<json> qas;
    std::vector<json> deferred;
    auto add_sentence = [&](const std::string& s) -> std::size_t {
      if (!context.empty()) context += ' ';
      const std::size_t at = context.size();
      context += s;
      return at;
    };
    auto emit = [&](const QaItem& qa, std::size_t base) {
      json answers = json::array();
      const json primary = {{"text", qa.answer}, {"answer_start", base + qa.answer_offset}};
      answers.push_back(primary);
      answers.push_back(primary);
      if (!qa.alt.empty()) answers.push_back({{"text", qa.alt}, {"answer_start", base + qa.alt_offset}});
      return json{{"question", qa.question}, {"answers", answers}, {"orig_answer", primary}};
    };

    std::vector<Fact> ordered;
    ordered.push_back(facts.front());
    for (auto& f : rest) ordered.push_back(std::move(f));
    for (const Fact& fact : ordered) {
      if (rng.below(3) == 0) add_sentence(fillers[rng.below(fillers.size())]);
      const std::size_t base = add_sentence(fact.sentence);
      qas.push_back(emit(fact.qas[0], base));
      if (fact.qas.size() > 1) deferred.push_back(emit(fact.qas[1], base));
      if (rng.below(6) == 0) {
        char q[128];
        std::snprintf(q, sizeof q, unanswerable[rng.below(unanswerable.size())].c_str(),
                      p.object.c_str());
        qas.push_back({{"question", q}, {"answers", json::array()}});
      }
    }
    // Later turns revisit earlier facts, so distant history matters less.
    rng.shuffle(deferred);
    for (auto& qa : deferred) qas.push_back(std::move(qa));

    const std::size_t cannot = context.size() + 1;
    context += " ";
    context += kCannotAnswer;
    for (auto& qa : qas) {
      if (qa.at("answers").empty()) {
        const json none = {{"text", kCannotAnswer}, {"answer_start", cannot}};
        qa["answers"] = json::array({none, none});
        qa["orig_answer"] = none;
      }
    }
    const int span = std::max(1, max_turns - min_turns + 1);
    const std::size_t turns = std::min<std::size_t>(
        qas.size(), static_cast<std::size_t>(min_turns + static_cast<int>(rng.below(span))));
    qas.resize(turns);

    char id[32];
    std::snprintf(id, sizeof id, "toy_C_%04d", d);
    for (std::size_t t = 0; t < qas.size(); ++t) qas[t]["id"] = std::string(id) + "_q#" + std::to_string(t);
    articles.push_back({{"title", p.full},
                        {"paragraphs", json::array({{{"id", id},
                                                     {"context", context},
                                                     {"qas", qas}}})}});
  }
  return {{"data", articles}};
}

}  // namespace cotah::corpus
