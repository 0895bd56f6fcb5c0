#include <cctype>
#include <cmath>

#include "cotah/common.hpp"
#include "cotah/selector.hpp"

namespace cotah::selector {

HashingEncoder::HashingEncoder(std::size_t dim) : dim_(dim) {
  if (dim_ < 2) throw ValidationError("hashing encoder needs dim >= 2");
}

Embedding HashingEncoder::encode(std::string_view text) const {
  Embedding v(dim_, 0.0);
  if (text.empty()) return v;
  std::string lower;
  for (unsigned char c : text) lower.push_back(static_cast<char>(std::tolower(c)));

  auto add = [&](std::string_view feature, double weight) {
    const std::uint64_t h = util::fnv1a(feature);
    // Bucket from the low bits, sign from the top bit; dimension 0 is
    // reserved for the presence feature.
    const std::size_t bucket = 1 + static_cast<std::size_t>(h % (dim_ - 1));
    v[bucket] += (h >> 63) != 0 ? -weight : weight;
  };

  std::string word;
  auto flush = [&] {
    if (!word.empty()) add("w:" + word, 1.0);
    word.clear();
  };
  for (char c : lower) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      word.push_back(c);
    } else {
      flush();
    }
  }
  flush();

  const std::string padded = "#" + lower + "#";
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    add("c:" + padded.substr(i, 3), 0.5);
  }
  v[0] = 0.01;
  return v;
}

TableEncoder::TableEncoder(std::map<std::string, Embedding> table) {
  for (auto& [text, vec] : table) {
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_) {
      throw ValidationError("embedding table: inconsistent dimension for '" + text + "'");
    }
    table_.emplace(text, std::move(vec));
  }
}

TableEncoder TableEncoder::from_jsonl(const std::filesystem::path& path) {
  std::map<std::string, Embedding> table;
  for (const auto& row : util::read_jsonl(path)) {
    try {
      table[row.at("text").get<std::string>()] = row.at("vector").get<Embedding>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("embedding table " + path.string() + ": " + e.what());
    }
  }
  return TableEncoder(std::move(table));
}

Embedding TableEncoder::encode(std::string_view text) const {
  auto it = table_.find(text);
  if (it == table_.end()) {
    throw ValidationError("embedding table has no vector for '" + std::string(text) + "'");
  }
  return it->second;
}

std::unique_ptr<SentenceEncoder> make_encoder(std::string_view kind, std::size_t dim,
                                              const std::filesystem::path& table_path) {
  if (kind == "hashing") return std::make_unique<HashingEncoder>(dim);
  if (kind == "table") {
    return std::make_unique<TableEncoder>(TableEncoder::from_jsonl(table_path));
  }
  throw ValidationError("unknown encoder '" + std::string(kind) + "'");
}

}  // namespace cotah::selector
