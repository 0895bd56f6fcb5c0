#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "variants.hpp"

namespace cotah::kernels {

namespace detail {
#if !defined(COTAH_HAVE_AVX2)
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#if !defined(COTAH_HAVE_NEON)
const KernelTable* neon_kernels() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(COTAH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_startup_table() {
  const char* env = std::getenv("COTAH_ISA");
  const std::string wanted = env ? env : "";
  if (wanted == "scalar") return &scalar_table();
  if (wanted.empty() || wanted == "avx2") {
    if (const KernelTable* t = avx2_table()) return t;
  }
  if (wanted.empty() || wanted == "neon") {
    if (const KernelTable* t = neon_table()) return t;
  }
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{pick_startup_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return detail::scalar_kernels(); }

const KernelTable* avx2_table() {
  static const bool supported = cpu_has_avx2();
  return supported ? detail::avx2_kernels() : nullptr;
}

const KernelTable* neon_table() { return detail::neon_kernels(); }

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

void force_isa(Isa isa) {
  const KernelTable* table = nullptr;
  switch (isa) {
    case Isa::scalar: table = &scalar_table(); break;
    case Isa::avx2: table = avx2_table(); break;
    case Isa::neon: table = neon_table(); break;
  }
  if (table == nullptr) {
    throw std::runtime_error("kernel variant unavailable: " +
                             std::string(isa_name(isa)));
  }
  current().store(table, std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double max(std::span<const double> x) {
  assert(!x.empty());
  return active().max(x.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(a, x.data(), y.data(), x.size());
}

void scale(double a, std::span<double> x) { active().scale(a, x.data(), x.size()); }

double sum_squares(std::span<const double> x) { return dot(x, x); }

void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  assert(w.size() == rows * cols && x.size() == cols && y.size() == rows);
  const KernelTable& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = k.dot(w.data() + r * cols, x.data(), cols);
  }
}

void matvec_transposed_add(std::span<const double> w, std::size_t rows,
                           std::size_t cols, std::span<const double> y,
                           std::span<double> x) {
  assert(w.size() == rows * cols && x.size() == cols && y.size() == rows);
  const KernelTable& k = active();
  for (std::size_t r = 0; r < rows; ++r) {
    if (y[r] != 0.0) k.axpy(y[r], w.data() + r * cols, x.data(), cols);
  }
}

void rank1_update(double a, std::span<const double> y,
                  std::span<const double> x, std::span<double> w) {
  assert(w.size() == y.size() * x.size());
  const KernelTable& k = active();
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (y[r] != 0.0) k.axpy(a * y[r], x.data(), w.data() + r * cols, cols);
  }
}

void softmax(std::span<const double> logits, std::span<double> out) {
  assert(logits.size() == out.size() && !logits.empty());
  const KernelTable& k = active();
  const double m = k.max(logits.data(), logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = std::exp(logits[i] - m);
  const double z = k.sum(out.data(), out.size());
  k.scale(1.0 / z, out.data(), out.size());
}

double log_sum_exp(std::span<const double> logits) {
  assert(!logits.empty());
  const double m = max(logits);
  double acc = 0.0;
  for (double v : logits) acc += std::exp(v - m);
  return m + std::log(acc);
}

}  // namespace cotah::kernels
