#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "cotah/kernels.hpp"
#include "cotah/qa.hpp"
#include "cotah/util.hpp"

namespace cotah::qa {
namespace {

constexpr std::array<std::string_view, 40> kStopwords = {
    "a", "an", "the", "of", "in", "on", "at", "to", "for", "and", "or", "but", "is",
    "was", "were", "are", "be", "did", "do", "does", "what", "when", "where", "who",
    "which", "why", "how", "he", "she", "it", "they", "his", "her", "their", "with",
    "by", "from", "as", "that", "this"};

std::string lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

bool content_word(const std::string& w) {
  if (w.empty() || std::ispunct(static_cast<unsigned char>(w[0]))) return false;
  return std::find(kStopwords.begin(), kStopwords.end(), w) == kStopwords.end();
}

}  // namespace

void ReaderBackend::zero_grad() {
  auto g = gradients();
  std::fill(g.begin(), g.end(), 0.0);
}

LinearSpanReader::LinearSpanReader(std::size_t num_features)
    : features_(num_features), params_(2 * num_features, 0.0), grads_(2 * num_features, 0.0) {
  if (features_ == 0 || features_ > kMaxFeatures) {
    throw ValidationError("linear reader: 1.." + std::to_string(kMaxFeatures) +
                          " features supported");
  }
}

void LinearSpanReader::initialize(std::uint64_t seed, double scale) {
  util::Rng rng(seed);
  for (double& w : params_) w = scale * rng.normal();
}

std::vector<double> LinearSpanReader::features(const ReaderInput& input) const {
  std::set<std::string> question;
  std::set<std::string> history;
  for (std::size_t i = 0; i < input.question_begin; ++i) {
    std::string w = lower(input.tokens[i]);
    if (content_word(w) && input.tokens[i] != kSepToken) history.insert(std::move(w));
  }
  for (std::size_t i = input.question_begin; i < input.question_end; ++i) {
    std::string w = lower(input.tokens[i]);
    if (content_word(w)) question.insert(std::move(w));
  }

  const std::size_t n = input.doc_len();
  std::vector<std::string> doc(n);
  std::vector<char> in_question(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    doc[i] = lower(input.tokens[input.doc_begin + i]);
    in_question[i] = question.count(doc[i]) != 0;
  }

  constexpr std::size_t kWindow = 3;
  std::vector<double> phi((n + 1) * features_, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double, kMaxFeatures> f{};
    f[0] = in_question[i];
    f[1] = history.count(doc[i]) != 0 ? 1.0 : 0.0;
    f[2] = 0.0;
    const std::size_t lo = i >= kWindow ? i - kWindow : 0;
    const std::size_t hi = std::min(n, i + kWindow + 1);
    double near = 0.0;
    for (std::size_t j = lo; j < hi; ++j) near += (j != i && in_question[j]) ? 1.0 : 0.0;
    f[3] = near / static_cast<double>(2 * kWindow);
    const auto c = static_cast<unsigned char>(input.tokens[input.doc_begin + i][0]);
    f[4] = (std::isupper(c) || std::isdigit(c)) ? 1.0 : 0.0;
    std::copy_n(f.begin(), features_, phi.begin() + static_cast<std::ptrdiff_t>(i * features_));
  }
  if (features_ > 2) phi[n * features_ + 2] = 1.0;
  return phi;
}

Logits LinearSpanReader::logits(const ReaderInput& input) const {
  const auto phi = features(input);
  const std::size_t rows = input.answer_positions();
  const std::span<const double> w(params_);
  Logits out{std::vector<double>(rows), std::vector<double>(rows)};
  kernels::matvec(phi, rows, features_, w.first(features_), out.start);
  kernels::matvec(phi, rows, features_, w.subspan(features_), out.end);
  return out;
}

void LinearSpanReader::backward(const ReaderInput& input, const Logits& dlogits) {
  const auto phi = features(input);
  const std::size_t rows = input.answer_positions();
  const std::span<double> g(grads_);
  kernels::matvec_transposed_add(phi, rows, features_, dlogits.start, g.first(features_));
  kernels::matvec_transposed_add(phi, rows, features_, dlogits.end, g.subspan(features_));
}

nlohmann::json LinearSpanReader::save() const {
  return {{"reader", name()}, {"features", features_}, {"params", params_}};
}

void LinearSpanReader::load(const nlohmann::json& j) {
  try {
    const auto f = j.at("features").get<std::size_t>();
    auto params = j.at("params").get<std::vector<double>>();
    if (f != features_ || params.size() != 2 * f) {
      throw ValidationError("reader checkpoint: shape mismatch");
    }
    params_ = std::move(params);
    grads_.assign(params_.size(), 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("reader checkpoint: ") + e.what());
  }
}

std::unique_ptr<ReaderBackend> make_reader(std::string_view kind) {
  if (kind == "linear") return std::make_unique<LinearSpanReader>();
  throw ValidationError("unknown reader '" + std::string(kind) + "'");
}

}  // namespace cotah::qa
