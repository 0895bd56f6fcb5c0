#include <algorithm>

#include "cotah/qa.hpp"

namespace cotah::qa {

std::optional<CharSpan> ReaderInput::char_span(AnswerSpan span) const {
  if (span.start_pos >= doc_len() || span.end_pos >= doc_len()) return std::nullopt;
  return CharSpan{doc_spans[span.start_pos].begin, doc_spans[span.end_pos].end};
}

std::string ReaderInput::span_text(const corpus::Document& doc, AnswerSpan span) const {
  const auto chars = char_span(span);
  if (!chars) return std::string(corpus::kCannotAnswer);
  return std::string(doc.slice(*chars));
}

std::optional<AnswerSpan> ReaderInput::locate(CharSpan chars) const {
  if (doc_spans.empty() || chars.end > doc_spans.back().end || chars.begin >= chars.end) {
    return std::nullopt;
  }
  auto first = std::find_if(doc_spans.begin(), doc_spans.end(),
                            [&](const CharSpan& t) { return t.end > chars.begin; });
  if (first == doc_spans.end() || first->begin >= chars.end) return std::nullopt;
  auto last = first;
  while (last + 1 != doc_spans.end() && (last + 1)->begin < chars.end) ++last;
  return AnswerSpan{static_cast<std::size_t>(first - doc_spans.begin()),
                    static_cast<std::size_t>(last - doc_spans.begin())};
}

ReaderInput serialize_reader_input(std::string_view question,
                                   std::span<const std::string> history,
                                   const corpus::Document& doc, std::size_t budget) {
  const auto q_tokens = corpus::tokenize(question);
  const std::size_t fixed = q_tokens.size() + 2;  // [SEP] and the sentinel
  if (fixed > budget) {
    throw ValidationError("reader input: question needs " + std::to_string(fixed) +
                          " tokens, budget is " + std::to_string(budget));
  }
  const auto doc_tokens = corpus::tokenize(doc.text);

  std::vector<std::vector<corpus::Token>> hist_tokens;
  std::size_t hist_total = 0;
  for (const auto& h : history) {
    hist_tokens.push_back(corpus::tokenize(h));
    hist_total += hist_tokens.back().size() + 1;
  }
  std::size_t first = 0;
  while (first < hist_tokens.size() && fixed + hist_total + doc_tokens.size() > budget) {
    hist_total -= hist_tokens[first].size() + 1;
    ++first;
  }
  const std::size_t doc_len = std::min(doc_tokens.size(), budget - fixed - hist_total);

  ReaderInput in;
  in.history_kept = hist_tokens.size() - first;
  in.tokens.reserve(fixed + hist_total + doc_len);
  for (std::size_t i = first; i < hist_tokens.size(); ++i) {
    for (const auto& t : hist_tokens[i]) in.tokens.push_back(t.text);
    in.tokens.emplace_back(kSepToken);
  }
  in.question_begin = in.tokens.size();
  for (const auto& t : q_tokens) in.tokens.push_back(t.text);
  in.question_end = in.tokens.size();
  in.tokens.emplace_back(kSepToken);
  in.doc_begin = in.tokens.size();
  for (std::size_t i = 0; i < doc_len; ++i) {
    in.tokens.push_back(doc_tokens[i].text);
    in.doc_spans.push_back(doc_tokens[i].span);
  }
  in.tokens.emplace_back(kNoAnswerToken);
  return in;
}

std::optional<AnswerSpan> gold_span(const corpus::Turn& turn, const ReaderInput& input) {
  const corpus::GoldAnswer& gold = turn.gold_answers.front();
  if (gold.unanswerable) {
    const std::size_t s = input.answer_positions() - 1;
    return AnswerSpan{s, s};
  }
  return input.locate(gold.char_span);
}

}  // namespace cotah::qa
