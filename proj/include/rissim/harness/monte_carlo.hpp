// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rissim/channel.hpp"
#include "rissim/solver_options.hpp"
#include "rissim/types.hpp"

namespace rissim {

// random_phase and no_ris are the W-only weighted sum-rate baselines.
enum class SolverId { wsr, mr, sr, random_phase, no_ris };

std::string solver_name(SolverId id);
SolverId parse_solver(const std::string &name); // throws std::invalid_argument

struct TrialSummary {
    int trial = 0;
    std::uint64_t seed = 0;
    SolverId solver = SolverId::wsr;
    std::uint64_t config_hash = 0;
    bool ok = true;
    std::string error;
    double objective = 0.0; // converged objective (nats/s/Hz)
    int iterations = 0;     // outer iterations (map evaluations)
    double time_ms = 0.0;
    IterationLog log;
};

struct MonteCarloStats {
    int succeeded = 0;
    int failed = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation
    double time_mean_ms = 0.0;
    double time_stddev_ms = 0.0;
};

struct MonteCarloResult {
    std::vector<TrialSummary> trials; // ordered by trial index
    MonteCarloStats stats;
};

// FNV-1a of the canonical JSON form.
std::uint64_t config_hash(const SystemConfig &cfg);

// Workers: RIS_SIM_THREADS if set and positive, else hardware concurrency.
int worker_count();

TrialSummary run_trial(const SystemConfig &cfg, SolverId solver, std::uint64_t seed, const SolverOptions &opts,
                       int trial = 0);

// Trial i uses seed base_seed + i. Failed trials are recorded and left out of
// the statistics.
MonteCarloResult monte_carlo(const SystemConfig &cfg, SolverId solver, int trials, std::uint64_t base_seed,
                             const SolverOptions &opts, int workers = 0);

MonteCarloStats summarize(const std::vector<TrialSummary> &trials);

} // namespace rissim
