// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rissim/channel.hpp"
#include "rissim/solver_options.hpp"
#include "rissim/surrogates.hpp"
#include "rissim/types.hpp"

namespace rissim {

// All links H_{k,j} for the current phases, indexed [k][j].
std::vector<std::vector<CMat>> mimo_links(const CVec &theta, const ChannelSetMimo &ch);

// T_k = sigma^2 I + sum_{j != k} H_kj W_j W_j^H H_kj^H.
CMat interference_covariance(int k, const SrDesign &design, const std::vector<std::vector<CMat>> &H,
                             double sigma2);

RVec pair_rates(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg);
double sr_objective(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg);

struct SrCoeffs {
    std::vector<CMat> A; // M^r x M^r, Hermitian PSD
    std::vector<CMat> B; // d x M^r
    std::vector<double> c0;
    RVec rate;
};
SrCoeffs compute_sr_coeffs(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg);

// Sum of the per-pair matrix minorizers evaluated at a design.
double sr_surrogate_value(const SrCoeffs &coeffs, const SrDesign &design, const ChannelSetMimo &ch,
                          double sigma2);

struct WkQuadratic {
    CMat R; // sum_j H_jk^H A_j H_jk
    CMat Q; // H_kk^H B_k^H
};
WkQuadratic build_wk_quadratic(int k, const SrCoeffs &coeffs, const ChannelSetMimo &ch, const SrDesign &design);

// Surrogate in theta: -theta^H L theta + 2 Re(theta^T diag(Nmat)) + c0 with
// L = (sum_k Hr_k^H A_k Hr_k) .* (sum_j G_j W_j W_j^H G_j^H)^T.
struct SrThetaQuadratic {
    CMat L;
    CMat Nmat;
    double c0 = 0.0;
};
SrThetaQuadratic build_theta_quadratic(const SrCoeffs &coeffs, const ChannelSetMimo &ch, const SrDesign &design,
                                       double sigma2);
double sr_theta_quadratic_value(const SrThetaQuadratic &q, const CVec &theta);

// Linear minorizer -2 Re(theta^H b) + c0 of the quadratic above on the unit
// circle, tangent at theta_anchor: b = (L - lambda I) theta_ - conj(diag(Nmat)).
// In the transposed pairing Re(theta^T b') this is b' = conj(b).
LinearizedForm linearize_theta_sr(const SrThetaQuadratic &q, const CVec &theta_anchor, double lambda);

// Top right singular vectors of H_kk at random phases, scaled to the budget.
SrDesign default_sr_init(const SystemConfig &cfg, const ChannelSetMimo &ch, std::uint64_t seed);

struct SrResult {
    SrDesign design;
    IterationLog log;
};

SrDesign sr_outer_step(const SystemConfig &cfg, const ChannelSetMimo &ch, const SolverOptions &opts,
                       const SrDesign &x, std::vector<double> *block_objs = nullptr);
SrResult run_sr_bmm(const SystemConfig &cfg, const ChannelSetMimo &ch, const SolverOptions &opts,
                    const SrDesign &init);

} // namespace rissim
