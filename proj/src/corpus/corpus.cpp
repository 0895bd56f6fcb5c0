#include <algorithm>
#include <fstream>
#include <sstream>

#include "cotah/corpus.hpp"
#include "cotah/eval.hpp"

namespace cotah::corpus {

using nlohmann::json;

std::vector<std::string> Turn::reference_texts() const {
  std::vector<std::string> refs;
  refs.reserve(gold_answers.size());
  for (const auto& a : gold_answers) refs.push_back(a.text);
  return refs;
}

std::vector<std::string> Dialog::history_questions(int k) const {
  std::vector<std::string> out;
  for (int i = 0; i < k && i < static_cast<int>(turns.size()); ++i) {
    out.push_back(turns[i].question);
  }
  return out;
}

namespace {

GoldAnswer parse_answer(const json& a, const Document& doc) {
  GoldAnswer g;
  g.text = a.at("text").get<std::string>();
  const auto start = a.at("answer_start").get<long long>();
  g.unanswerable = g.text == kCannotAnswer;
  if (start < 0 || static_cast<std::size_t>(start) + g.text.size() > doc.text.size()) {
    throw ValidationError("answer '" + g.text + "' at " + std::to_string(start) +
                          " lies outside the document");
  }
  g.char_span = {static_cast<std::size_t>(start),
                 static_cast<std::size_t>(start) + g.text.size()};
  if (doc.slice(g.char_span) != g.text) {
    throw ValidationError("answer text '" + g.text + "' does not match document span at " +
                          std::to_string(start));
  }
  return g;
}

Dialog parse_dialog(const json& paragraph, const std::string& dialog_id,
                    const SentenceSegmenter& segmenter) {
  auto doc = std::make_shared<Document>();
  doc->doc_id = dialog_id;
  doc->text = paragraph.at("context").get<std::string>();
  doc->sentences = segmenter.segment(doc->text);

  Dialog dialog;
  dialog.dialog_id = dialog_id;
  dialog.document = doc;
  const json& qas = paragraph.at("qas");
  for (std::size_t t = 0; t < qas.size(); ++t) {
    const json& qa = qas[t];
    Turn turn;
    turn.turn_index = static_cast<int>(t);
    turn.qa_id = qa.value("id", dialog_id + "_q#" + std::to_string(t));
    turn.question = qa.at("question").get<std::string>();
    const json* answers = qa.contains("answers") ? &qa.at("answers") : nullptr;
    if (answers != nullptr && !answers->empty()) {
      for (const auto& a : *answers) turn.gold_answers.push_back(parse_answer(a, *doc));
    } else if (qa.contains("orig_answer")) {
      turn.gold_answers.push_back(parse_answer(qa.at("orig_answer"), *doc));
    }
    if (turn.gold_answers.empty()) {
      throw ValidationError("turn " + std::to_string(t) + " has no gold answers");
    }
    const auto refs = turn.reference_texts();
    turn.human_f1 = eval::human_f1(refs);
    dialog.turns.push_back(std::move(turn));
  }
  return dialog;
}

// Id of the last paragraph opened before `offset`, for syntax errors.
std::string dialog_near(const std::string& content, std::size_t offset) {
  const std::string key = "\"id\"";
  std::size_t at = content.rfind(key, std::min(offset, content.size()));
  if (at == std::string::npos) return {};
  at = content.find('"', content.find(':', at + key.size()));
  if (at == std::string::npos || at >= offset) return {};
  const std::size_t end = content.find('"', at + 1);
  if (end == std::string::npos) return {};
  return content.substr(at + 1, end - at - 1);
}

}  // namespace

std::vector<Dialog> parse_corpus(const json& root, const SentenceSegmenter& segmenter) {
  const json* articles = &root;
  if (root.is_object()) {
    if (!root.contains("data")) throw ParseError("corpus: missing top-level 'data'");
    articles = &root.at("data");
  }
  if (!articles->is_array()) throw ParseError("corpus: expected a list of articles");

  std::vector<Dialog> dialogs;
  for (std::size_t a = 0; a < articles->size(); ++a) {
    const json& article = (*articles)[a];
    const std::string title = article.is_object() ? article.value("title", "") : "";
    if (!article.is_object() || !article.contains("paragraphs")) {
      throw ParseError("corpus: article " + std::to_string(a) + " has no paragraphs");
    }
    const json& paragraphs = article.at("paragraphs");
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
      const json& paragraph = paragraphs[p];
      std::string dialog_id = "article" + std::to_string(a) + "_p" + std::to_string(p);
      if (paragraph.is_object() && paragraph.contains("id") && paragraph["id"].is_string()) {
        dialog_id = paragraph["id"].get<std::string>();
      }
      try {
        dialogs.push_back(parse_dialog(paragraph, dialog_id, segmenter));
      } catch (const json::exception& e) {
        throw ParseError("dialog " + dialog_id + ": " + e.what());
      } catch (const ValidationError& e) {
        throw ValidationError("dialog " + dialog_id + ": " + e.what());
      }
    }
  }
  return dialogs;
}

std::vector<Dialog> load_corpus(const std::filesystem::path& path) {
  return load_corpus(path, RuleSegmenter{});
}

std::vector<Dialog> load_corpus(const std::filesystem::path& path,
                                const SentenceSegmenter& segmenter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("corpus: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ParseError("corpus: " + path.string() + " is empty");
  }
  json root;
  try {
    root = json::parse(content);
  } catch (const json::parse_error& e) {
    const std::string near = dialog_near(content, e.byte);
    throw ParseError("corpus: " + path.string() +
                     (near.empty() ? std::string() : " in dialog " + near) + ": " + e.what());
  }
  return parse_corpus(root, segmenter);
}

}  // namespace cotah::corpus
