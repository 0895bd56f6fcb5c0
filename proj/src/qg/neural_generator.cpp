#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "cotah/kernels.hpp"
#include "cotah/qg.hpp"
#include "cotah/util.hpp"
#include "detok.hpp"

namespace cotah::qg {
namespace {

constexpr std::size_t kUnk = 0;
constexpr std::size_t kBos = 1;
constexpr std::size_t kEos = 2;

class Vocab {
 public:
  Vocab() = default;
  explicit Vocab(std::vector<std::string> words) : words_(std::move(words)) {
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
  }

  // Reserved entries first, then by descending frequency, ties by spelling.
  static Vocab build(const std::map<std::string, std::size_t>& counts,
                     std::vector<std::string> reserved, std::size_t limit) {
    std::vector<std::pair<std::string, std::size_t>> items(counts.begin(), counts.end());
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [word, n] : items) {
      if (reserved.size() >= limit) break;
      if (std::find(reserved.begin(), reserved.end(), word) == reserved.end()) {
        reserved.push_back(word);
      }
    }
    return Vocab(std::move(reserved));
  }

  std::size_t id(const std::string& w) const {
    auto it = index_.find(w);
    return it == index_.end() ? kUnk : it->second;
  }
  const std::string& word(std::size_t id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

class NeuralGenerator final : public GeneratorBackend {
 public:
  explicit NeuralGenerator(NeuralGeneratorOptions options) : opt_(options) {}

  std::string name() const override { return "neural"; }

  void prepare(std::span<const TrainingPair> pairs, std::uint64_t seed) override {
    std::map<std::string, std::size_t> in_counts;
    std::map<std::string, std::size_t> out_counts;
    for (const auto& p : pairs) {
      for (const auto& t : p.input) ++in_counts[t];
      for (const auto& t : p.target) ++out_counts[t];
    }
    in_vocab_ = Vocab::build(in_counts, {"<unk>"}, opt_.max_input_vocab);
    out_vocab_ = Vocab::build(out_counts, {"<unk>", "<s>", "</s>"}, opt_.max_output_vocab);
    layout();
    util::Rng rng(util::derive_seed(seed, "qg-init"));
    for (double& w : params_) w = 0.1 * rng.normal();
    std::fill(params_.begin() + off_bh_, params_.begin() + off_bh_ + h(), 0.0);
    std::fill(params_.begin() + off_bo_, params_.begin() + off_bo_ + out_vocab_.size(), 0.0);
    adam_ = std::make_unique<util::Adam>(params_.size(),
                                         util::Adam::Options{.learning_rate = opt_.learning_rate});
  }

  double loss(const TrainingPair& pair) const override {
    const Encoded e = encode(pair.input);
    const auto targets = target_ids(pair.target);
    std::vector<double> hidden(h());
    std::vector<double> probs(out_vocab_.size());
    double total = 0.0;
    std::size_t prev = kBos;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      step(e, prev, t, hidden, probs);
      total -= std::log(std::max(probs[targets[t]], 1e-300));
      prev = targets[t];
    }
    return total / static_cast<double>(targets.size());
  }

  double train_step(std::span<const TrainingPair> batch) override {
    grads_.assign(params_.size(), 0.0);
    double total = 0.0;
    for (const auto& pair : batch) total += accumulate(pair, 1.0 / static_cast<double>(batch.size()));
    adam_->step(params_, grads_);
    return total / static_cast<double>(batch.size());
  }

  std::string generate(const TokenSeq& input, const DecodeConfig& config) const override {
    const Encoded e = encode(input);
    std::vector<double> hidden(h());
    std::vector<double> probs(out_vocab_.size());
    std::vector<std::string> words;
    std::size_t prev = kBos;
    for (std::size_t t = 0; t < config.max_new_tokens; ++t) {
      step(e, prev, t, hidden, probs);
      std::size_t best = kEos;
      for (std::size_t v = kEos + 1; v < probs.size(); ++v) {
        if (probs[v] > probs[best]) best = v;
      }
      if (best == kEos) break;
      words.push_back(out_vocab_.word(best));
      prev = best;
    }
    return detail::detokenize(words);
  }

  nlohmann::json save() const override {
    return {{"backend", name()},
            {"hidden", opt_.hidden},
            {"max_positions", opt_.max_positions},
            {"input_vocab", in_vocab_.words()},
            {"output_vocab", out_vocab_.words()},
            {"params", params_}};
  }

  void load(const nlohmann::json& j) override {
    try {
      opt_.hidden = j.at("hidden").get<std::size_t>();
      opt_.max_positions = j.at("max_positions").get<std::size_t>();
      in_vocab_ = Vocab(j.at("input_vocab").get<std::vector<std::string>>());
      out_vocab_ = Vocab(j.at("output_vocab").get<std::vector<std::string>>());
      layout();
      auto params = j.at("params").get<std::vector<double>>();
      if (params.size() != params_.size()) {
        throw ValidationError("generator checkpoint: parameter count mismatch");
      }
      params_ = std::move(params);
      adam_ = std::make_unique<util::Adam>(params_.size(),
                                           util::Adam::Options{.learning_rate = opt_.learning_rate});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("generator checkpoint: ") + e.what());
    }
  }

 private:
  struct Encoded {
    std::vector<std::size_t> ids;
    std::vector<std::size_t> answer_ids;
    std::vector<double> answer_mean;
    std::vector<double> input_mean;
    std::vector<double> context;  // A a + C c + b_h
  };

  std::size_t h() const { return opt_.hidden; }

  void layout() {
    const std::size_t H = h();
    off_ein_ = 0;
    off_eprev_ = off_ein_ + in_vocab_.size() * H;
    off_pos_ = off_eprev_ + out_vocab_.size() * H;
    off_a_ = off_pos_ + opt_.max_positions * H;
    off_c_ = off_a_ + H * H;
    off_bh_ = off_c_ + H * H;
    off_w_ = off_bh_ + H;
    off_bo_ = off_w_ + out_vocab_.size() * H;
    params_.assign(off_bo_ + out_vocab_.size(), 0.0);
  }

  std::span<const double> block(std::size_t off, std::size_t n) const {
    return std::span<const double>(params_).subspan(off, n);
  }
  std::span<double> grad_block(std::size_t off, std::size_t n) {
    return std::span<double>(grads_).subspan(off, n);
  }

  Encoded encode(const TokenSeq& input) const {
    const std::size_t H = h();
    Encoded e;
    e.answer_mean.assign(H, 0.0);
    e.input_mean.assign(H, 0.0);
    bool in_answer = false;
    for (const auto& tok : input) {
      const std::size_t id = in_vocab_.id(tok);
      e.ids.push_back(id);
      if (tok == kAnswerMarker) {
        in_answer = true;
        continue;
      }
      if (tok == kHistoryMarker) in_answer = false;
      if (in_answer) e.answer_ids.push_back(id);
    }
    for (std::size_t id : e.ids) kernels::axpy(1.0, block(off_ein_ + id * H, H), e.input_mean);
    if (!e.ids.empty()) kernels::scale(1.0 / static_cast<double>(e.ids.size()), e.input_mean);
    for (std::size_t id : e.answer_ids) kernels::axpy(1.0, block(off_ein_ + id * H, H), e.answer_mean);
    if (!e.answer_ids.empty()) {
      kernels::scale(1.0 / static_cast<double>(e.answer_ids.size()), e.answer_mean);
    }
    e.context.assign(H, 0.0);
    std::vector<double> tmp(H);
    kernels::matvec(block(off_a_, H * H), H, H, e.answer_mean, tmp);
    kernels::axpy(1.0, tmp, e.context);
    kernels::matvec(block(off_c_, H * H), H, H, e.input_mean, tmp);
    kernels::axpy(1.0, tmp, e.context);
    kernels::axpy(1.0, block(off_bh_, H), e.context);
    return e;
  }

  std::vector<std::size_t> target_ids(const TokenSeq& target) const {
    std::vector<std::size_t> ids;
    for (const auto& t : target) ids.push_back(out_vocab_.id(t));
    ids.push_back(kEos);
    return ids;
  }

  std::size_t position(std::size_t t) const { return std::min(t, opt_.max_positions - 1); }

  // hidden = tanh(E_prev[prev] + Pos[t] + context); probs = softmax(W hidden + b_o)
  void step(const Encoded& e, std::size_t prev, std::size_t t, std::vector<double>& hidden,
            std::vector<double>& probs) const {
    const std::size_t H = h();
    const std::size_t V = out_vocab_.size();
    const auto prev_emb = block(off_eprev_ + prev * H, H);
    const auto pos_emb = block(off_pos_ + position(t) * H, H);
    for (std::size_t i = 0; i < H; ++i) {
      hidden[i] = std::tanh(prev_emb[i] + pos_emb[i] + e.context[i]);
    }
    kernels::matvec(block(off_w_, V * H), V, H, hidden, probs);
    kernels::axpy(1.0, block(off_bo_, V), probs);
    kernels::softmax(probs, probs);
  }

  double accumulate(const TrainingPair& pair, double weight) {
    const std::size_t H = h();
    const std::size_t V = out_vocab_.size();
    const Encoded e = encode(pair.input);
    const auto targets = target_ids(pair.target);
    const double w = weight / static_cast<double>(targets.size());

    std::vector<double> hidden(H);
    std::vector<double> probs(V);
    std::vector<double> dh(H);
    std::vector<double> dcontext(H, 0.0);
    double total = 0.0;
    std::size_t prev = kBos;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      step(e, prev, t, hidden, probs);
      total -= std::log(std::max(probs[targets[t]], 1e-300));
      probs[targets[t]] -= 1.0;  // d loss / d logits
      kernels::scale(w, probs);
      kernels::rank1_update(1.0, probs, hidden, grad_block(off_w_, V * H));
      kernels::axpy(1.0, probs, grad_block(off_bo_, V));
      std::fill(dh.begin(), dh.end(), 0.0);
      kernels::matvec_transposed_add(block(off_w_, V * H), V, H, probs, dh);
      for (std::size_t i = 0; i < H; ++i) dh[i] *= 1.0 - hidden[i] * hidden[i];
      kernels::axpy(1.0, dh, grad_block(off_eprev_ + prev * H, H));
      kernels::axpy(1.0, dh, grad_block(off_pos_ + position(t) * H, H));
      kernels::axpy(1.0, dh, dcontext);
      prev = targets[t];
    }

    kernels::axpy(1.0, dcontext, grad_block(off_bh_, H));
    kernels::rank1_update(1.0, dcontext, e.answer_mean, grad_block(off_a_, H * H));
    kernels::rank1_update(1.0, dcontext, e.input_mean, grad_block(off_c_, H * H));
    std::vector<double> da(H, 0.0);
    std::vector<double> dc(H, 0.0);
    kernels::matvec_transposed_add(block(off_a_, H * H), H, H, dcontext, da);
    kernels::matvec_transposed_add(block(off_c_, H * H), H, H, dcontext, dc);
    if (!e.ids.empty()) {
      const double s = 1.0 / static_cast<double>(e.ids.size());
      for (std::size_t id : e.ids) kernels::axpy(s, dc, grad_block(off_ein_ + id * H, H));
    }
    if (!e.answer_ids.empty()) {
      const double s = 1.0 / static_cast<double>(e.answer_ids.size());
      for (std::size_t id : e.answer_ids) kernels::axpy(s, da, grad_block(off_ein_ + id * H, H));
    }
    return total / static_cast<double>(targets.size());
  }

  NeuralGeneratorOptions opt_;
  Vocab in_vocab_;
  Vocab out_vocab_;
  std::vector<double> params_;
  std::vector<double> grads_;
  std::unique_ptr<util::Adam> adam_;
  std::size_t off_ein_ = 0, off_eprev_ = 0, off_pos_ = 0, off_a_ = 0, off_c_ = 0;
  std::size_t off_bh_ = 0, off_w_ = 0, off_bo_ = 0;
};

}  // namespace

std::unique_ptr<GeneratorBackend> make_neural_generator(NeuralGeneratorOptions options) {
  return std::make_unique<NeuralGenerator>(options);
}

}  // namespace cotah::qg
