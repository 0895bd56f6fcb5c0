#pragma once

#include "cotah/kernels.hpp"

namespace cotah::kernels::detail {

const KernelTable& scalar_kernels();
// Defined only when the corresponding translation unit is compiled in.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

}  // namespace cotah::kernels::detail
