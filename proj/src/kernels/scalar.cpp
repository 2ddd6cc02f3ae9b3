// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "rissim/kernels.hpp"

namespace rissim::kernels::scalar {

void align_phases(const cd *b, const cd *fallback, cd *out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = b[i].real(), im = b[i].imag();
        const double r2 = re * re + im * im;
        if (r2 == 0.0) {
            out[i] = fallback ? fallback[i] : cd(1.0, 0.0);
            continue;
        }
        const double r = std::sqrt(r2);
        out[i] = cd(-re / r, -im / r);
    }
}

void project_discrete(const cd *b, const double *cos_phi, const double *sin_phi,
                      std::size_t nq, cd *out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = b[i].real(), im = b[i].imag();
        std::size_t best = 0;
        double best_val = cos_phi[0] * re + sin_phi[0] * im;
        for (std::size_t q = 1; q < nq; ++q) {
            const double v = cos_phi[q] * re + sin_phi[q] * im;
            if (v < best_val) {
                best_val = v;
                best = q;
            }
        }
        out[i] = cd(cos_phi[best], sin_phi[best]);
    }
}

double abs2_sum(const cd *x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

} // namespace rissim::kernels::scalar
