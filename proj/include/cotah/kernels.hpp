#pragma once
// Dense double-precision kernels used by the encoders, readers and the
// generator.  Each primitive has a scalar reference implementation and,
// where the target supports it, an AVX2 or NEON variant.  The variant is
// picked once at startup from CPU features; COTAH_ISA=scalar forces the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace cotah::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*max)(const double* x, std::size_t n);  // n > 0
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  void (*scale)(double a, double* x, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();
const KernelTable* neon_table();

const KernelTable& active();
Isa active_isa();
// Overrides the startup choice; for tests and benchmarks.  Throws if the
// requested variant is unavailable.
void force_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
double sum(std::span<const double> x);
double max(std::span<const double> x);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);
double sum_squares(std::span<const double> x);

// y = W x, W row-major rows x cols.
void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
// x += W^T y
void matvec_transposed_add(std::span<const double> w, std::size_t rows,
                           std::size_t cols, std::span<const double> y,
                           std::span<double> x);
// W += a * y x^T
void rank1_update(double a, std::span<const double> y,
                  std::span<const double> x, std::span<double> w);

// Numerically stable softmax; out may alias logits.
void softmax(std::span<const double> logits, std::span<double> out);
double log_sum_exp(std::span<const double> logits);

}  // namespace cotah::kernels
