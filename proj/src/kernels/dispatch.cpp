// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <cstring>

#include "rissim/kernels.hpp"

namespace rissim::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

struct Table {
    Isa isa;
    void (*align)(const cd *, const cd *, cd *, std::size_t);
    void (*discrete)(const cd *, const double *, const double *, std::size_t, cd *, std::size_t);
    double (*abs2)(const cd *, std::size_t);
};

Table select() {
    const char *env = std::getenv("RIS_SIM_ISA");
    const bool force_scalar = env && std::strcmp(env, "scalar") == 0;
    if (!force_scalar && cpu_has_avx2())
        return {Isa::avx2, avx2::align_phases, avx2::project_discrete, avx2::abs2_sum};
    return {Isa::scalar, scalar::align_phases, scalar::project_discrete, scalar::abs2_sum};
}

const Table &table() {
    static const Table t = select();
    return t;
}

} // namespace

Isa active_isa() { return table().isa; }

const char *isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void align_phases(const cd *b, const cd *fallback, cd *out, std::size_t n) {
    table().align(b, fallback, out, n);
}

void project_discrete(const cd *b, const double *cos_phi, const double *sin_phi,
                      std::size_t nq, cd *out, std::size_t n) {
    table().discrete(b, cos_phi, sin_phi, nq, out, n);
}

double abs2_sum(const cd *x, std::size_t n) { return table().abs2(x, n); }

} // namespace rissim::kernels
