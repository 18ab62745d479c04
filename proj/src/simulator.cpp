#include "bbupool/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "bbupool/errors.hpp"
#include "bbupool/numerics.hpp"

namespace bbupool {

namespace {

struct Pending {
    double arrival_time;  // frame-start instant the SR entered the queue
    double t1;
    double demand;
    long arrival_frame;
};

struct Completion {
    double time;
    int rrh;
    double t1;
    double t2;
    double t3;
    bool record;

    bool operator>(const Completion& other) const {
        if (time != other.time) {
            return time > other.time;
        }
        return rrh > other.rrh;
    }
};

}  // namespace

SimulationResult simulate(const SimulationConfig& config) {
    const SystemConfig& sys = config.system;
    sys.validate();
    const int n_rrh = sys.num_rrh;
    const int l_cap = sys.max_concurrent;
    const double frame = sys.frame_duration;
    const long pool_cap = static_cast<long>(l_cap) * n_rrh;

    if (config.num_frames < 1) {
        throw ConfigError("simulate: num_frames must be >= 1");
    }
    if (config.warmup_frames < 0 || config.warmup_frames >= config.num_frames) {
        throw ConfigError("simulate: warmup_frames must lie in [0, num_frames)");
    }
    if (config.queue_hard_cap < 1) {
        throw ConfigError("simulate: queue_hard_cap must be >= 1");
    }

    SimulationResult result;
    long budget = 0;
    if (config.policy == Policy::long_term) {
        if (config.servers < 1 || config.servers > pool_cap) {
            throw ConfigError("simulate: long_term servers must lie in [1, L*N]");
        }
        budget = config.servers;
        // Controlled instability runs are allowed; flag them instead of rejecting.
        result.stability_warning = !stability_check(sys, config.servers).stable;
    }

    std::vector<std::mt19937_64> rng;
    rng.reserve(n_rrh);
    for (int j = 0; j < n_rrh; ++j) {
        rng.emplace_back(num::derive_stream_seed(config.seed, static_cast<std::uint64_t>(j)));
    }
    std::vector<std::poisson_distribution<long>> arrivals;
    for (int j = 0; j < n_rrh; ++j) {
        arrivals.emplace_back(std::max(sys.arrival_rates[j], 1e-300));
    }
    std::uniform_real_distribution<double> offset(0.0, frame);
    std::exponential_distribution<double> demand(sys.service_rate);

    std::vector<std::deque<Pending>> waiting(n_rrh);
    std::vector<long> in_system(n_rrh, 0);
    std::vector<int> in_service(n_rrh, 0);
    result.max_in_service_per_rrh.assign(n_rrh, 0);
    long busy = 0;
    int cursor = 0;
    std::priority_queue<Completion, std::vector<Completion>, std::greater<>> completions;

    const bool any_collect =
        config.collect_t1 || config.collect_t2 || config.collect_t3 || config.collect_rrh;
    const long expected =
        static_cast<long>(sys.total_arrival_rate() *
                          static_cast<double>(config.num_frames - config.warmup_frames)) +
        16;
    if (config.collect_t1) result.t1_samples.reserve(expected);
    if (config.collect_t2) result.t2_samples.reserve(expected);
    if (config.collect_t3) result.t3_samples.reserve(expected);
    if (config.collect_rrh) result.sample_rrh.reserve(expected);

    auto grant = [&](double now) {
        while (busy < budget) {
            int found = -1;
            for (int step = 0; step < n_rrh; ++step) {
                const int r = (cursor + step) % n_rrh;
                if (!waiting[r].empty() && in_service[r] < l_cap) {
                    found = r;
                    break;
                }
            }
            if (found < 0) {
                return;
            }
            Pending p = waiting[found].front();
            waiting[found].pop_front();
            ++in_service[found];
            ++busy;
            result.max_in_service_per_rrh[found] =
                std::max(result.max_in_service_per_rrh[found], in_service[found]);
            completions.push({now + p.demand, found, p.t1, now - p.arrival_time, p.demand,
                              p.arrival_frame >= config.warmup_frames});
            cursor = (found + 1) % n_rrh;
        }
    };

    for (long n = 0; n < config.num_frames; ++n) {
        const double start = static_cast<double>(n) * frame;
        const double end = start + frame;

        if (config.record_occupancy && n >= config.warmup_frames) {
            const std::size_t occ = static_cast<std::size_t>(in_system[0]);
            if (result.occupancy_histogram.size() <= occ) {
                result.occupancy_histogram.resize(occ + 1, 0);
            }
            ++result.occupancy_histogram[occ];
        }

        for (int j = 0; j < n_rrh; ++j) {
            const long v = sys.arrival_rates[j] > 0.0 ? arrivals[j](rng[j]) : 0;
            for (long i = 0; i < v; ++i) {
                const double t1 = offset(rng[j]);
                const double d = demand(rng[j]);
                ++result.transfers_arrived;
                if (in_system[j] >= config.queue_hard_cap) {
                    ++result.transfers_blocked;
                    continue;
                }
                ++in_system[j];
                waiting[j].push_back({start, t1, d, n});
            }
        }

        if (config.policy == Policy::short_term) {
            budget = 0;
            for (int j = 0; j < n_rrh; ++j) {
                budget += std::min<long>(l_cap, in_system[j]);
            }
        }
        if (busy > budget) {
            throw std::logic_error("simulate: allocated budget fell below busy servers");
        }

        grant(start);

        while (!completions.empty() && completions.top().time < end) {
            const Completion ev = completions.top();
            completions.pop();
            --busy;
            --in_service[ev.rrh];
            --in_system[ev.rrh];
            ++result.transfers_completed;
            if (ev.record && any_collect) {
                if (config.collect_t1) result.t1_samples.push_back(ev.t1);
                if (config.collect_t2) result.t2_samples.push_back(ev.t2);
                if (config.collect_t3) result.t3_samples.push_back(ev.t3);
                if (config.collect_rrh) result.sample_rrh.push_back(ev.rrh);
            }
            grant(ev.time);
        }

        if (n >= config.warmup_frames) {
            ++result.frames_observed;
            result.active_server_frames += static_cast<double>(budget);
        }
    }

    for (int j = 0; j < n_rrh; ++j) {
        result.transfers_in_system_end += in_system[j];
    }
    result.offered_server_frames =
        static_cast<double>(pool_cap) * static_cast<double>(result.frames_observed);
    if (result.transfers_arrived != result.transfers_completed +
                                        result.transfers_in_system_end +
                                        result.transfers_blocked) {
        throw std::logic_error("simulate: conservation identity violated");
    }
    return result;
}

double empirical_percentile(std::vector<double> samples, double zeta) {
    if (samples.empty()) {
        throw ConfigError("empirical_percentile: empty sample set");
    }
    if (!(zeta > 0.0 && zeta <= 1.0)) {
        throw ConfigError("empirical_percentile: zeta must lie in (0, 1]");
    }
    const auto n = static_cast<double>(samples.size());
    auto rank = static_cast<long>(std::ceil(zeta * n));
    rank = std::clamp<long>(rank, 1, samples.size());
    std::nth_element(samples.begin(), samples.begin() + (rank - 1), samples.end());
    return samples[rank - 1];
}

int required_servers_by_simulation(const SystemConfig& config, double tau, double zeta,
                                   long frames, std::uint64_t seed) {
    config.validate();
    if (!(tau > 0.0)) {
        throw ConfigError("required_servers_by_simulation: tau must be > 0");
    }
    const int cap = config.max_concurrent * config.num_rrh;
    const double threshold = config.total_arrival_rate() / config.mu_f();
    const int start = std::max(1, static_cast<int>(std::floor(threshold)) + 1);
    const long warmup = std::min<long>(frames / 100, 10000);

    double best_pct = -1.0;
    int best_c = start;
    for (int c = start; c <= cap; ++c) {
        SimulationConfig sim;
        sim.system = config;
        sim.policy = Policy::long_term;
        sim.servers = c;
        sim.num_frames = frames;
        sim.warmup_frames = warmup;
        sim.seed = seed;
        sim.collect_t1 = false;
        sim.collect_t2 = true;
        sim.collect_t3 = false;
        SimulationResult res = simulate(sim);
        if (res.t2_samples.empty()) {
            return c;  // no arrivals, any stable allocation meets the target
        }
        const double pct = empirical_percentile(std::move(res.t2_samples), zeta);
        if (pct < tau) {
            return c;
        }
        if (best_pct < 0.0 || pct < best_pct) {
            best_pct = pct;
            best_c = c;
        }
    }
    throw InfeasibleError("required_servers_by_simulation: no c <= L*N meets tau; best " +
                              std::to_string(best_pct) + " at c = " + std::to_string(best_c),
                          best_c, best_pct);
}

}  // namespace bbupool
