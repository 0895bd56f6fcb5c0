#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cotah/pipeline.hpp"

namespace cotah::pipeline {
namespace {

using Base = std::filesystem::path;
using Setter = std::function<void(PipelineConfig&, std::string_view, const Base&)>;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ValidationError("config: bad value '" + std::string(value) + "' for " +
                          std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config: bad boolean '" + std::string(value) + "' for " +
                        std::string(key));
}

std::filesystem::path resolve(std::string_view value, const Base& base) {
  std::filesystem::path p{std::string(value)};
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

template <typename T>
Setter number(T PipelineConfig::*field) {
  return [field](PipelineConfig& c, std::string_view v, const Base&) {
    c.*field = parse_number<T>("", v);
  };
}

Setter text(std::string PipelineConfig::*field) {
  return [field](PipelineConfig& c, std::string_view v, const Base&) { c.*field = v; };
}

Setter path(std::filesystem::path PipelineConfig::*field) {
  return [field](PipelineConfig& c, std::string_view v, const Base& b) {
    c.*field = resolve(v, b);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"corpus.train", path(&PipelineConfig::corpus_train)},
      {"corpus.eval", path(&PipelineConfig::corpus_eval)},
      {"workdir", path(&PipelineConfig::workdir)},
      {"seed", number(&PipelineConfig::seed)},
      {"split.seed",
       [](PipelineConfig& c, std::string_view v, const Base&) {
         c.split_seed = parse_number<std::uint64_t>("split.seed", v);
       }},
      {"threads", number(&PipelineConfig::threads)},
      {"qg.backend", text(&PipelineConfig::qg_backend)},
      {"qg.epochs", number(&PipelineConfig::qg_epochs)},
      {"qg.batch_size", number(&PipelineConfig::qg_batch_size)},
      {"qg.learning_rate", number(&PipelineConfig::qg_learning_rate)},
      {"qg.hidden", number(&PipelineConfig::qg_hidden)},
      {"qg.max_vocab", number(&PipelineConfig::qg_max_vocab)},
      {"qg.input_budget", number(&PipelineConfig::qg_input_budget)},
      {"qg.max_new_tokens", number(&PipelineConfig::qg_max_new_tokens)},
      {"mine.max_candidates", number(&PipelineConfig::mine_max_candidates)},
      {"mine.lexicon", path(&PipelineConfig::mine_lexicon)},
      {"select.M", number(&PipelineConfig::select_M)},
      {"select.gamma", number(&PipelineConfig::select_gamma)},
      {"select.S", number(&PipelineConfig::select_S)},
      {"select.distribution", text(&PipelineConfig::select_distribution)},
      {"select.encoder", text(&PipelineConfig::select_encoder)},
      {"select.encoder_dim", number(&PipelineConfig::select_encoder_dim)},
      {"select.embeddings", path(&PipelineConfig::select_embeddings)},
      {"select.resample_each_epoch",
       [](PipelineConfig& c, std::string_view v, const Base&) {
         c.select_resample_each_epoch = parse_bool("select.resample_each_epoch", v);
       }},
      {"qa.reader", text(&PipelineConfig::qa_reader)},
      {"qa.lambda", number(&PipelineConfig::qa_lambda)},
      {"qa.tau", number(&PipelineConfig::qa_tau)},
      {"qa.epochs", number(&PipelineConfig::qa_epochs)},
      {"qa.learning_rate", number(&PipelineConfig::qa_learning_rate)},
      {"qa.batch_size", number(&PipelineConfig::qa_batch_size)},
      {"qa.max_answer_len", number(&PipelineConfig::qa_max_answer_len)},
      {"qa.input_budget", number(&PipelineConfig::qa_input_budget)},
      {"qa.init_scale", number(&PipelineConfig::qa_init_scale)},
      {"eval.split", text(&PipelineConfig::eval_split)},
  };
  return table;
}

void validate(const PipelineConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("config: " + what);
  };
  require(c.select_gamma >= -1.0 && c.select_gamma <= 1.0, "select.gamma must lie in [-1, 1]");
  require(c.select_M > 0, "select.M must be positive");
  require(c.select_distribution == "uniform" || c.select_distribution == "linear",
          "select.distribution must be uniform or linear");
  require(c.select_encoder == "hashing" || c.select_encoder == "table",
          "select.encoder must be hashing or table");
  require(c.qg_backend == "neural" || c.qg_backend == "template",
          "qg.backend must be neural or template");
  require(c.qa_reader == "linear", "qa.reader must be linear");
  require(c.qa_lambda >= 0.0, "qa.lambda must be non-negative");
  require(c.qa_tau >= 0, "qa.tau must be non-negative");
  require(c.qa_epochs > 0 && c.qg_epochs >= 0, "epoch counts must be positive");
  require(c.qa_batch_size > 0 && c.qg_batch_size > 0, "batch sizes must be positive");
  require(c.qa_max_answer_len > 0, "qa.max_answer_len must be positive");
  require(c.eval_split == "test" || c.eval_split == "dev", "eval.split must be test or dev");
}

}  // namespace

void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw ValidationError("config: unknown key '" + std::string(key) + "'");
  }
  try {
    it->second(config, value, base_dir);
  } catch (const ValidationError&) {
    throw ValidationError("config: bad value '" + std::string(value) + "' for " +
                          std::string(key));
  }
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  PipelineConfig config;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("config line " + std::to_string(line_no) + ": empty key");
    }
    set_config_value(config, key, value, base_dir);
  }
  validate(config);
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

}  // namespace cotah::pipeline
