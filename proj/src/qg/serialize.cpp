#include <algorithm>

#include "cotah/qg.hpp"

namespace cotah::qg {

TokenSeq serialize_generator_input(const corpus::Document& doc,
                                   std::span<const std::string> history,
                                   std::string_view answer,
                                   std::optional<CharSpan> answer_span,
                                   std::size_t budget) {
  CharSpan span;
  if (answer_span) {
    span = *answer_span;
  } else {
    const std::size_t at = doc.text.find(answer);
    if (answer.empty() || at == std::string::npos) {
      throw ValidationError("generator input: answer '" + std::string(answer) +
                            "' not found in document " + doc.doc_id);
    }
    span = {at, at + answer.size()};
  }
  const std::size_t sentence = corpus::locate_answer_sentence(doc, span);

  TokenSeq answer_part{std::string(kAnswerMarker)};
  for (auto& t : corpus::tokenize(answer)) answer_part.push_back(std::move(t.text));

  std::vector<TokenSeq> questions;
  for (const auto& q : history) {
    TokenSeq toks;
    for (auto& t : corpus::tokenize(q)) toks.push_back(std::move(t.text));
    questions.push_back(std::move(toks));
  }
  auto history_size = [&](std::size_t first) {
    std::size_t n = 1;  // [HISTORY]
    for (std::size_t i = first; i < questions.size(); ++i) {
      n += questions[i].size() + (i > first ? 1 : 0);
    }
    return n;
  };
  // Oldest questions go first when the header alone overflows the budget.
  std::size_t first = 0;
  while (first < questions.size() &&
         answer_part.size() + history_size(first) + 1 > budget) {
    ++first;
  }

  TokenSeq out = answer_part;
  out.emplace_back(kHistoryMarker);
  for (std::size_t i = first; i < questions.size(); ++i) {
    if (i > first) out.emplace_back(kSepMarker);
    out.insert(out.end(), questions[i].begin(), questions[i].end());
  }
  out.emplace_back(kDocMarker);

  const auto doc_tokens = corpus::tokenize(doc.text);
  const std::size_t room = budget > out.size() ? budget - out.size() : 0;
  std::size_t begin = 0;
  std::size_t end = doc_tokens.size();
  if (doc_tokens.size() > room) {
    const CharSpan s = doc.sentences[sentence];
    auto sb = std::lower_bound(doc_tokens.begin(), doc_tokens.end(), s.begin,
                               [](const corpus::Token& t, std::size_t pos) { return t.span.begin < pos; });
    auto se = std::lower_bound(doc_tokens.begin(), doc_tokens.end(), s.end,
                               [](const corpus::Token& t, std::size_t pos) { return t.span.begin < pos; });
    const auto s_begin = static_cast<std::size_t>(sb - doc_tokens.begin());
    const auto s_end = static_cast<std::size_t>(se - doc_tokens.begin());
    const std::size_t center = (s_begin + s_end) / 2;
    const std::size_t half = room / 2;
    begin = center > half ? center - half : 0;
    begin = std::min(begin, doc_tokens.size() - room);
    end = begin + room;
  }
  for (std::size_t i = begin; i < end; ++i) out.push_back(doc_tokens[i].text);
  return out;
}

}  // namespace cotah::qg
