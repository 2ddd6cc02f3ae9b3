// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rissim/channel.hpp"
#include "rissim/types.hpp"

namespace rissim {

enum class ProblemKind { wsr, mr, sr };

// Real gradients represented as complex arrays g with df = Re <g, dx>.
struct MisoGradient {
    CMat W;
    std::vector<CVec> theta;
};
// Gradient of log(1 + SINR_k).
MisoGradient rate_gradient(int k, const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                           const SystemConfig &cfg);

struct SrGradient {
    std::vector<CMat> W;
    CVec theta;
};
SrGradient sr_gradient(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg);

// Norm of the projected gradient in coordinates where W is divided by
// sqrt(P): the W part is projected onto the tangent cone of the power set
// (total or per-antenna), each phase onto its unit-circle tangent line.
// For the max-min problem the residual is the smallest such norm over convex
// combinations of the gradients of users whose rate is within
// active_tol * max(1, min rate) of the minimum.
double kkt_residual(const Design &design, const ChannelSetMiso &ch, const ReflectionTopology &topo,
                    const SystemConfig &cfg, ProblemKind kind, double active_tol = 1e-4);
double kkt_residual(const SrDesign &design, const ChannelSetMimo &ch, const SystemConfig &cfg);

} // namespace rissim
