#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include "cotah/corpus.hpp"
#include "cotah/util.hpp"

namespace fixtures {

inline std::shared_ptr<cotah::corpus::Document> document(std::string text) {
  auto doc = std::make_shared<cotah::corpus::Document>();
  doc->doc_id = "doc";
  doc->text = std::move(text);
  doc->sentences = cotah::corpus::segment_sentences(doc->text);
  return doc;
}

inline cotah::CharSpan find(const cotah::corpus::Document& doc, std::string_view needle) {
  const auto pos = doc.text.find(needle);
  if (pos == std::string::npos) throw std::runtime_error("fixture: missing " + std::string(needle));
  return {pos, pos + needle.size()};
}

// Turn whose gold answer is `answer` located in the document, or
// unanswerable when `answer` is empty.
inline cotah::corpus::Turn turn(const cotah::corpus::Document& doc, int k, std::string question,
                                std::string_view answer) {
  cotah::corpus::Turn t;
  t.turn_index = k;
  t.qa_id = "q" + std::to_string(k);
  t.question = std::move(question);
  cotah::corpus::GoldAnswer g;
  if (answer.empty()) {
    g.text = std::string(cotah::corpus::kCannotAnswer);
    g.unanswerable = true;
  } else {
    g.text = std::string(answer);
    g.char_span = find(doc, answer);
  }
  t.gold_answers = {g};
  return t;
}

// Probability vector of length n with entries drawn from the rng; with
// `ties`, values are quantized so exact ties are common.
inline std::vector<double> random_distribution(cotah::util::Rng& rng, std::size_t n,
                                               bool ties = false) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) {
    x = ties ? static_cast<double>(rng.below(4)) : rng.uniform();
    total += x;
  }
  if (total == 0.0) {
    p.assign(n, 1.0 / static_cast<double>(n));
    return p;
  }
  for (double& x : p) x /= total;
  return p;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cotah_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace fixtures
