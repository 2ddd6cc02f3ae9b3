// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "rissim/channel.hpp"
#include "rissim/solver_options.hpp"
#include "rissim/types.hpp"

namespace rissim {

struct BaselineResult {
    Design design;
    double objective = 0.0;
    IterationLog log;
};

// Phases frozen at the random initial draw of `seed`; only W is optimized.
BaselineResult random_phase_baseline(const SystemConfig &cfg, const ChannelSetMiso &ch,
                                     const ReflectionTopology &topo, const SolverOptions &opts, std::uint64_t seed);

// Reflection paths removed; only W is optimized over the direct channels.
BaselineResult no_ris_baseline(const SystemConfig &cfg, const ChannelSetMiso &ch, const SolverOptions &opts,
                               std::uint64_t seed);

} // namespace rissim
