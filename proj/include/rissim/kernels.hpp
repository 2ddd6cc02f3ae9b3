// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "rissim/types.hpp"

// Element-wise phase kernels. Each entry point has a scalar reference version
// and an AVX2 version; the dispatcher picks one at first use based on the CPU.
// Setting RIS_SIM_ISA=scalar in the environment forces the scalar path.
namespace rissim::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
const char *isa_name(Isa isa);
bool cpu_has_avx2();

// out_n = -b_n / |b_n|, i.e. exp(j*ang(-b_n)). Entries with b_n == 0 take
// fallback_n when fallback is non-null, otherwise 1.
void align_phases(const cd *b, const cd *fallback, cd *out, std::size_t n);

// out_n = exp(j*phi_q) with q = argmin_q cos(phi_q) Re(b_n) + sin(phi_q) Im(b_n);
// ties resolve to the smallest q. Tables hold nq entries sorted by phase.
void project_discrete(const cd *b, const double *cos_phi, const double *sin_phi,
                      std::size_t nq, cd *out, std::size_t n);

// sum_n |x_n|^2
double abs2_sum(const cd *x, std::size_t n);

namespace scalar {
void align_phases(const cd *b, const cd *fallback, cd *out, std::size_t n);
void project_discrete(const cd *b, const double *cos_phi, const double *sin_phi,
                      std::size_t nq, cd *out, std::size_t n);
double abs2_sum(const cd *x, std::size_t n);
} // namespace scalar

namespace avx2 {
void align_phases(const cd *b, const cd *fallback, cd *out, std::size_t n);
void project_discrete(const cd *b, const double *cos_phi, const double *sin_phi,
                      std::size_t nq, cd *out, std::size_t n);
double abs2_sum(const cd *x, std::size_t n);
} // namespace avx2

} // namespace rissim::kernels
