#include <algorithm>

#include "cotah/qg.hpp"
#include "detok.hpp"

namespace cotah::qg {
namespace {

class TemplateGenerator final : public GeneratorBackend {
 public:
  std::string name() const override { return "template"; }
  void prepare(std::span<const TrainingPair>, std::uint64_t) override {}
  double loss(const TrainingPair&) const override { return 0.0; }
  double train_step(std::span<const TrainingPair>) override { return 0.0; }

  std::string generate(const TokenSeq& input, const DecodeConfig& config) const override {
    auto begin = std::find(input.begin(), input.end(), kAnswerMarker);
    auto end = std::find(input.begin(), input.end(), kHistoryMarker);
    if (begin == input.end() || end <= begin + 1) return {};
    std::vector<std::string> words{"What", "about"};
    for (auto it = begin + 1; it != end; ++it) words.push_back(*it);
    words.emplace_back("?");
    if (words.size() > config.max_new_tokens) {
      words.resize(config.max_new_tokens);
    }
    return detail::detokenize(words);
  }

  nlohmann::json save() const override { return {{"backend", name()}}; }
  void load(const nlohmann::json&) override {}
};

}  // namespace

std::unique_ptr<GeneratorBackend> make_template_generator() {
  return std::make_unique<TemplateGenerator>();
}

std::unique_ptr<GeneratorBackend> make_generator(std::string_view kind,
                                                 NeuralGeneratorOptions options) {
  if (kind == "neural") return make_neural_generator(options);
  if (kind == "template") return make_template_generator();
  throw ValidationError("unknown generator backend '" + std::string(kind) + "'");
}

}  // namespace cotah::qg
