#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cotah::util {

std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t hash = 14695981039346656037ULL);

// Seed for one random stream, a pure function of its coordinates.  Every
// stochastic stage draws from a stream derived this way.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view stage,
                          std::string_view dialog_id = {}, std::int64_t k = -1);

// Thin wrapper over mt19937_64 that avoids the implementation-defined
// standard distributions, so streams agree across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Runs fn(i) for i in [0, n) across worker threads.  Callers write results
// into pre-sized slots, so output order never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = 0);

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path,
                 std::span<const nlohmann::json> rows);
nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

// Adam over a flat parameter vector.
class Adam {
 public:
  struct Options {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  Adam(std::size_t size, Options options);
  void step(std::span<double> params, std::span<const double> grads);
  std::size_t steps() const { return t_; }

 private:
  Options opt_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

}  // namespace cotah::util
