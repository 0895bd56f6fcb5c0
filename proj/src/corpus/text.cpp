#include <algorithm>
#include <array>
#include <cctype>

#include "cotah/corpus.hpp"

namespace cotah::corpus {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || u >= 0x80;
}
bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool opens_sentence(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isupper(u) != 0 || std::isdigit(u) != 0 || c == '"' || c == '\'' ||
         c == '(' || c == '[';
}

constexpr std::array<std::string_view, 18> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "vs", "no",
    "mt", "gen", "col", "capt", "lt", "sgt", "rev", "ft"};

// The word immediately before the period at `dot`, including inner periods.
bool is_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && (std::isalpha(static_cast<unsigned char>(text[begin - 1])) ||
                       text[begin - 1] == '.')) {
    --begin;
  }
  std::string word;
  for (std::size_t i = begin; i < dot; ++i) {
    word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
  }
  if (word.empty()) return false;
  // Dotted acronyms such as "u.s" or "e.g".
  if (word.find('.') != std::string::npos) return true;
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
         kAbbreviations.end();
}

}  // namespace

std::vector<CharSpan> RuleSegmenter::segment(std::string_view text) const {
  std::vector<CharSpan> spans;
  const std::size_t n = text.size();
  std::size_t start = 0;
  while (start < n && is_space(text[start])) ++start;
  std::size_t i = start;
  while (i < n) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < n && (is_terminal(text[end]) || is_closer(text[end]))) ++end;
    std::size_t next = end;
    while (next < n && is_space(text[next])) ++next;
    const bool at_end = next == n;
    const bool boundary = end < n && is_space(text[end]) && next < n &&
                          opens_sentence(text[next]) &&
                          !(text[i] == '.' && end == i + 1 && is_abbreviation(text, i));
    if (at_end || boundary) {
      spans.push_back({start, end});
      start = next;
      i = next;
    } else {
      i = end;
    }
  }
  if (start < n) {
    std::size_t end = n;
    while (end > start && is_space(text[end - 1])) --end;
    if (end > start) spans.push_back({start, end});
  }
  return spans;
}

std::vector<CharSpan> segment_sentences(std::string_view text) {
  return RuleSegmenter{}.segment(text);
}

std::vector<Token> tokenize(std::string_view text, std::size_t base) {
  std::vector<Token> tokens;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    if (is_word_char(text[i])) {
      ++i;
      while (i < n) {
        if (is_word_char(text[i])) {
          ++i;
        } else if ((text[i] == '\'' || text[i] == '-' || text[i] == '.') &&
                   i + 1 < n && is_word_char(text[i + 1])) {
          i += 2;
        } else {
          break;
        }
      }
    } else {
      ++i;
    }
    tokens.push_back({std::string(text.substr(begin, i - begin)),
                      {base + begin, base + i}});
  }
  return tokens;
}

std::size_t locate_answer_sentence(const Document& doc, CharSpan span) {
  if (span.begin >= doc.text.size() || span.end > doc.text.size() ||
      span.begin > span.end) {
    throw ValidationError("answer span [" + std::to_string(span.begin) + ", " +
                          std::to_string(span.end) + ") outside document " +
                          doc.doc_id);
  }
  if (doc.sentences.empty()) {
    throw ValidationError("document " + doc.doc_id + " has no sentences");
  }
  // Last sentence starting at or before the first character; a position in
  // inter-sentence whitespace belongs to the preceding sentence.
  auto it = std::upper_bound(doc.sentences.begin(), doc.sentences.end(), span.begin,
                             [](std::size_t pos, const CharSpan& s) { return pos < s.begin; });
  if (it == doc.sentences.begin()) return 0;
  return static_cast<std::size_t>(std::distance(doc.sentences.begin(), it)) - 1;
}

}  // namespace cotah::corpus
