// SPDX-License-Identifier: Apache-2.0
#include "rissim/harness/monte_carlo.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "rissim/harness/baselines.hpp"
#include "rissim/harness/config.hpp"
#include "rissim/mr.hpp"
#include "rissim/sr.hpp"
#include "rissim/wsr.hpp"

namespace rissim {

std::string solver_name(SolverId id) {
    switch (id) {
    case SolverId::wsr:
        return "wsr";
    case SolverId::mr:
        return "mr";
    case SolverId::sr:
        return "sr";
    case SolverId::random_phase:
        return "random-phase";
    case SolverId::no_ris:
        return "no-ris";
    }
    return "?";
}

SolverId parse_solver(const std::string &name) {
    for (SolverId id : {SolverId::wsr, SolverId::mr, SolverId::sr, SolverId::random_phase, SolverId::no_ris})
        if (solver_name(id) == name)
            return id;
    throw std::invalid_argument("unknown solver: " + name);
}

std::uint64_t config_hash(const SystemConfig &cfg) {
    const std::string s = config_to_json(cfg).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

int worker_count() {
    if (const char *env = std::getenv("RIS_SIM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

TrialSummary run_trial(const SystemConfig &cfg, SolverId solver, std::uint64_t seed, const SolverOptions &opts,
                       int trial) {
    TrialSummary t;
    t.trial = trial;
    t.seed = seed;
    t.solver = solver;
    t.config_hash = config_hash(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (solver == SolverId::sr) {
            if (cfg.kind != SystemKind::mimo)
                throw std::invalid_argument("sum-rate solver needs a MIMO system");
            const ChannelSetMimo ch = generate_channels_mimo(cfg, seed);
            SrResult r = run_sr_bmm(cfg, ch, opts, default_sr_init(cfg, ch, seed));
            t.log = std::move(r.log);
        } else {
            if (cfg.kind != SystemKind::miso)
                throw std::invalid_argument(solver_name(solver) + " solver needs a MISO system");
            const ChannelSetMiso ch = generate_channels_miso(cfg, seed);
            const ReflectionTopology topo = make_topology(cfg);
            switch (solver) {
            case SolverId::wsr:
                t.log = run_wsr_bmm(cfg, ch, topo, opts, default_init(cfg, ch, seed)).log;
                break;
            case SolverId::mr:
                t.log = run_mr_bmm(cfg, ch, topo, opts, default_init(cfg, ch, seed)).log;
                break;
            case SolverId::random_phase:
                t.log = random_phase_baseline(cfg, ch, topo, opts, seed).log;
                break;
            default:
                t.log = no_ris_baseline(cfg, ch, opts, seed).log;
                break;
            }
        }
        t.objective = t.log.iters.back().objective;
        t.iterations = t.log.map_evaluations;
    } catch (const std::exception &e) {
        t.ok = false;
        t.error = e.what();
    }
    t.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return t;
}

MonteCarloStats summarize(const std::vector<TrialSummary> &trials) {
    MonteCarloStats s;
    double sum = 0.0, sum_t = 0.0;
    for (const auto &t : trials) {
        if (!t.ok) {
            ++s.failed;
            continue;
        }
        ++s.succeeded;
        sum += t.objective;
        sum_t += t.time_ms;
    }
    if (s.succeeded == 0)
        return s;
    s.mean = sum / s.succeeded;
    s.time_mean_ms = sum_t / s.succeeded;
    double v = 0.0, vt = 0.0;
    for (const auto &t : trials)
        if (t.ok) {
            v += (t.objective - s.mean) * (t.objective - s.mean);
            vt += (t.time_ms - s.time_mean_ms) * (t.time_ms - s.time_mean_ms);
        }
    if (s.succeeded > 1) {
        s.stddev = std::sqrt(v / (s.succeeded - 1));
        s.time_stddev_ms = std::sqrt(vt / (s.succeeded - 1));
    }
    return s;
}

MonteCarloResult monte_carlo(const SystemConfig &cfg, SolverId solver, int trials, std::uint64_t base_seed,
                             const SolverOptions &opts, int workers) {
    if (trials < 1)
        throw std::invalid_argument("monte_carlo: trials must be >= 1");
    validate(cfg);
    MonteCarloResult out;
    out.trials.resize(trials);
    const int nw = std::max(1, std::min(trials, workers > 0 ? workers : worker_count()));
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int i = next++; i < trials; i = next++) {
            SolverOptions o = opts;
            o.on_block = nullptr;
            out.trials[i] = run_trial(cfg, solver, base_seed + static_cast<std::uint64_t>(i), o, i);
        }
    };
    if (nw == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w)
            pool.emplace_back(work);
        for (auto &th : pool)
            th.join();
    }
    out.stats = summarize(out.trials);
    return out;
}

} // namespace rissim
