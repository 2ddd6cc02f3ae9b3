// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rissim/types.hpp"

namespace rissim {

struct EigenDecomposition {
    CMat V;      // unitary, columns are eigenvectors
    RVec lambda; // nonnegative, descending
};

// Eigendecomposition of a Hermitian PSD matrix. Throws std::invalid_argument
// ("not Hermitian") when ||A - A^H||_F exceeds 1e-10 relative to ||A||_F, and
// when an eigenvalue is below -1e-10 * max(1, ||A||_F).
EigenDecomposition hermitian_eig(const CMat &A);

struct EigenvalueEstimate {
    double value = 0.0;
    int iterations = 0;
    bool fallback = false; // true when the trace bound was returned
};

// Upper estimate of the largest eigenvalue of a Hermitian PSD matrix by power
// iteration. The returned value is the Rayleigh quotient plus the residual
// norm, which bounds lambda_max from above once the iteration has locked onto
// the dominant eigenvector; trace(A) is returned if 500 steps do not suffice.
EigenvalueEstimate largest_eigenvalue(const CMat &A, double tol = 1e-10);

// f(gamma) = sum_n [V^H Q Q^H V]_nn / (lambda_n + gamma)^2
double secular_function(const EigenDecomposition &eig, const CMat &Q, double gamma);

// Root gamma >= 0 of f(gamma) = P. Requires the constraint to be active.
double solve_power_multiplier(const EigenDecomposition &eig, const CMat &Q, double P);

// Same root for sum_t sum_n z_t[n] / (lambda_t[n] + gamma)^2 = P, used when
// every beamformer has its own quadratic. z_t[n] = |[V_t^H q_t]_n|^2.
double solve_power_multiplier_terms(const std::vector<RVec> &z, const std::vector<RVec> &lambda, double P);

// log det of a Hermitian PD matrix via Cholesky; throws if not PD.
double logdet_hpd(const CMat &A);

} // namespace rissim
