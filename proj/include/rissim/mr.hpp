// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rissim/channel.hpp"
#include "rissim/solver_options.hpp"
#include "rissim/types.hpp"

namespace rissim {

double mr_objective(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                    const SystemConfig &cfg);
// Per-user rates log(1 + SINR_k).
RVec user_rates(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                const SystemConfig &cfg);

// Point on the scaled simplex {s > 0, sum s = c} with the mirror-ascent
// step counter t (stepsize r / sqrt(t)).
struct SimplexState {
    RVec s;
    int t = 1;
    double r = 1.0;
    double c = 1.0;
};
SimplexState uniform_simplex(int K, double r, double c);

// s+ = c (s .* exp(-gamma g)) / sum(s .* exp(-gamma g)), gamma = r / sqrt(t).
SimplexState maa_step(const SimplexState &state, const RVec &g);

// Per-user convex pieces phi_k(W) = tr(W^H R_k W) - 2 Re(w_k^H q_k) - const_k,
// each the negated rate minorizer of user k.
struct MrWTerms {
    std::vector<CMat> R;
    std::vector<CVec> q;
    RVec constant;
};
MrWTerms mr_w_terms(const CMat &W, const CMat &H, double sigma2);

// argmin_W sum_k s_k phi_k(W) over the power set.
CMat mr_w_inner_solve(const RVec &s, const MrWTerms &terms, double P,
                      const std::vector<PowerConstraint> &constraints = {});
// [g]_k = phi_k(X).
RVec mr_w_subgradient(const CMat &X, const MrWTerms &terms);

// Per-user linearized phase pieces phi_k(theta) = 2 Re(theta^H b_k) - c0_k.
struct MrThetaTerms {
    std::vector<CVec> b;
    RVec c0;
};
// l is the 1-based RIS index.
MrThetaTerms mr_theta_terms(int l, const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                            const SystemConfig &cfg);
// theta = exp(j ang(-sum_k s_k b_k)); zero entries keep the fallback phase.
CVec mr_theta_inner_solve(const RVec &s, const std::vector<CVec> &b, const CVec *fallback = nullptr);
RVec mr_theta_subgradient(const CVec &theta, const MrThetaTerms &terms);

struct MaaTrace {
    int iterations = 0;
    double saddle_value = 0.0; // h(s) at the last iterate
    RVec s;
};

// Simplex weights carried between outer iterations when warm starts are on.
struct MaaWarm {
    RVec w;
    RVec theta;
};

struct MrResult {
    Design design;
    IterationLog log;
    int rejected_blocks = 0;
};

// One outer iteration: W block, then the phase block, each solved by mirror
// ascent and accepted only if its minimum surrogate does not drop.
Design mr_outer_step(const SystemConfig &cfg, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                     const SolverOptions &opts, const Design &x, std::vector<double> *block_objs = nullptr,
                     int *rejected = nullptr, MaaWarm *warm = nullptr);

MrResult run_mr_bmm(const SystemConfig &cfg, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                    const SolverOptions &opts, const Design &init);

} // namespace rissim
