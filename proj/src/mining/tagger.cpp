#include <cctype>
#include <fstream>
#include <initializer_list>
#include <utility>

#include "cotah/mining.hpp"

namespace cotah::mining {
namespace {

void add(std::map<std::string, std::string>& lex, const char* tag,
         std::initializer_list<const char*> words) {
  for (const char* w : words) lex.emplace(w, tag);
}

std::map<std::string, std::string> builtin_lexicon() {
  std::map<std::string, std::string> lex;
  add(lex, "DT", {"the", "a", "an", "this", "that", "these", "those", "each", "every",
                  "some", "any", "no", "another", "all", "both", "either", "neither"});
  add(lex, "PRP", {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her",
                   "us", "them", "himself", "herself", "itself", "themselves"});
  add(lex, "PRP$", {"my", "your", "his", "its", "our", "their"});
  add(lex, "IN", {"in", "on", "at", "by", "for", "with", "about", "against", "between",
                  "into", "through", "during", "before", "after", "above", "below",
                  "from", "up", "down", "of", "off", "over", "under", "since", "until",
                  "while", "because", "although", "though", "if", "than", "as", "like",
                  "within", "without", "upon", "among", "across", "toward", "towards"});
  add(lex, "TO", {"to"});
  add(lex, "CC", {"and", "or", "but", "nor", "yet", "so"});
  add(lex, "WP", {"who", "whom", "what"});
  add(lex, "WDT", {"which", "whatever"});
  add(lex, "WRB", {"when", "where", "why", "how"});
  add(lex, "MD", {"can", "could", "will", "would", "shall", "should", "may", "might", "must"});
  add(lex, "VBZ", {"is", "has", "does", "says"});
  add(lex, "VBP", {"are", "am", "have", "do"});
  add(lex, "VBD", {"was", "were", "had", "did", "said", "met", "made", "went", "came",
                   "took", "gave", "got", "saw", "knew", "found", "told", "became",
                   "began", "left", "felt", "brought", "wrote", "won", "led", "held",
                   "ran", "sold", "built", "sang", "spent", "released", "joined",
                   "moved", "studied", "played", "married", "visited", "praised",
                   "recorded", "toured", "formed", "signed", "worked", "died", "lived",
                   "stopped", "started", "returned", "received", "reported", "considered"});
  add(lex, "VB", {"be", "go", "make", "take", "get", "see", "know", "run", "play",
                  "work", "study", "move", "join", "win", "release", "marry", "visit"});
  add(lex, "VBN", {"been", "born", "known", "done", "given", "taken", "written", "seen",
                   "lost", "called", "named", "based"});
  add(lex, "VBG", {"being", "having", "doing", "going"});
  add(lex, "RB", {"not", "n't", "also", "very", "often", "never", "always", "later",
                  "then", "now", "quickly", "still", "just", "again", "only", "soon",
                  "already", "too", "well", "here", "there", "however", "most", "more"});
  add(lex, "JJ", {"first", "second", "third", "last", "new", "old", "good", "great",
                  "big", "small", "young", "early", "late", "local", "major", "red", "blue",
                  "warm", "bright", "restless", "layered", "sparse", "little", "many",
                  "several", "other", "productive", "national", "own", "best", "famous",
                  "popular", "successful", "solo"});
  add(lex, "CD", {"one", "two", "three", "four", "five", "six", "seven", "eight",
                  "nine", "ten", "hundred", "thousand", "million"});
  add(lex, "EX", {"there"});
  return lex;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

LexiconTagger::LexiconTagger(std::map<std::string, std::string> lexicon, bool shape_fallback)
    : lexicon_(std::move(lexicon)), shape_fallback_(shape_fallback) {}

LexiconTagger LexiconTagger::builtin() { return LexiconTagger(builtin_lexicon()); }

LexiconTagger LexiconTagger::with_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("lexicon: cannot open " + path.string());
  auto lex = builtin_lexicon();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    std::string word = line.substr(0, tab);
    const std::string tag = tab == std::string::npos ? "" : line.substr(tab + 1);
    if (word.empty() || tag.empty() || tag.find_first_of(" \t") != std::string::npos) {
      throw ParseError("lexicon: " + path.string() + ":" + std::to_string(line_no) +
                       ": expected 'word TAG'");
    }
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    lex[word] = tag;
  }
  return LexiconTagger(std::move(lex));
}

std::string LexiconTagger::guess(const corpus::Token& token) const {
  const std::string& w = token.text;
  const auto first = static_cast<unsigned char>(w[0]);
  if (std::isdigit(first)) return "CD";
  if (std::ispunct(first) && w.size() == 1) {
    if (w == "," || w == ":" || w == ";") return w;
    if (w == "." || w == "?" || w == "!") return ".";
    return "SYM";
  }
  if (!shape_fallback_) return "UNK";
  if (std::isupper(first)) {
    // Unknown capitalised words are names, sentence-initial or not.
    return "NNP";
  }
  std::string lower = w;
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ends_with(lower, "ly")) return "RB";
  if (ends_with(lower, "ing")) return "VBG";
  if (ends_with(lower, "ed")) return "VBD";
  if (ends_with(lower, "ous") || ends_with(lower, "ful") || ends_with(lower, "ive") ||
      ends_with(lower, "able") || ends_with(lower, "ical")) {
    return "JJ";
  }
  if (ends_with(lower, "s") && !ends_with(lower, "ss")) return "NNS";
  return "NN";
}

std::vector<std::string> LexiconTagger::tag(std::span<const corpus::Token> sentence) const {
  std::vector<std::string> tags;
  tags.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    std::string lower = sentence[i].text;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto it = lexicon_.find(lower);
    const bool capitalised = std::isupper(static_cast<unsigned char>(sentence[i].text[0])) != 0;
    // Mid-sentence capitals override the dictionary ("Will Smith", "May").
    if (it != lexicon_.end() && !(capitalised && i > 0 && shape_fallback_ &&
                                  it->second != "PRP" && it->second != "DT")) {
      tags.push_back(it->second);
    } else {
      tags.push_back(guess(sentence[i]));
    }
  }
  return tags;
}

}  // namespace cotah::mining
