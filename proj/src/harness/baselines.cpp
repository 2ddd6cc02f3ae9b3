// SPDX-License-Identifier: Apache-2.0
#include "rissim/harness/baselines.hpp"

#include "rissim/wsr.hpp"

namespace rissim {

BaselineResult random_phase_baseline(const SystemConfig &cfg, const ChannelSetMiso &ch,
                                     const ReflectionTopology &topo, const SolverOptions &opts, std::uint64_t seed) {
    SolverOptions o = opts;
    o.update_theta = false;
    const WsrResult r = run_wsr_bmm(cfg, ch, topo, o, default_init(cfg, ch, seed));
    return {r.design, r.log.iters.back().objective, r.log};
}

BaselineResult no_ris_baseline(const SystemConfig &cfg, const ChannelSetMiso &ch, const SolverOptions &opts,
                               std::uint64_t seed) {
    SolverOptions o = opts;
    o.update_theta = false;
    const ReflectionTopology none = no_reflection_topology(ch.K());
    const WsrResult r = run_wsr_bmm(cfg, ch, none, o, default_init(cfg, ch, seed));
    return {r.design, r.log.iters.back().objective, r.log};
}

} // namespace rissim
