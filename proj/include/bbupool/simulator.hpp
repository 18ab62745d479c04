#pragma once

#include <cstdint>
#include <vector>

#include "bbupool/config.hpp"
#include "bbupool/savings.hpp"

namespace bbupool {

struct SimulationConfig {
    SystemConfig system;
    Policy policy = Policy::long_term;
    int servers = 0;          // fixed allocation for long_term; unused for short_term
    long num_frames = 0;      // total simulated frames, warmup included
    long warmup_frames = 0;   // leading frames excluded from statistics
    std::uint64_t seed = 1;
    bool collect_t1 = true;
    bool collect_t2 = true;
    bool collect_t3 = true;
    bool collect_rrh = false;       // per-sample RRH index, for raw CSV export
    bool record_occupancy = false;  // pre-arrival occupancy histogram of RRH 0
    long queue_hard_cap = 10000;    // per-RRH in-system cap; excess arrivals blocked
};

struct SimulationResult {
    // One entry per completed transfer, aligned across vectors.
    std::vector<double> t1_samples, t2_samples, t3_samples;
    std::vector<int> sample_rrh;
    std::vector<long> occupancy_histogram;

    double active_server_frames = 0.0;   // sum of per-frame allocation over observed frames
    double offered_server_frames = 0.0;  // L * N * frames_observed
    long frames_observed = 0;
    long transfers_arrived = 0;
    long transfers_completed = 0;
    long transfers_blocked = 0;
    long transfers_in_system_end = 0;
    std::vector<int> max_in_service_per_rrh;
    bool stability_warning = false;

    double empirical_savings() const {
        return offered_server_frames > 0.0
                   ? 1.0 - active_server_frames / offered_server_frames
                   : 1.0;
    }
};

// Frame-based discrete-event run. Arrivals enter at frame starts (data
// availability uniform in the preceding frame), service is continuous-time
// exponential within frames, freed servers are re-granted round-robin with a
// persistent cursor, and per-RRH concurrency never exceeds L. Short-term
// policy sets each frame's budget to sum_j min(L, l_j) after arrivals and
// charges it for the whole frame. RRH j draws from its own RNG stream
// derived from the seed, so streams are independent across RRHs.
SimulationResult simulate(const SimulationConfig& config);

// Nearest-rank order statistic at index ceil(zeta * n).
double empirical_percentile(std::vector<double> samples, double zeta);

// Smallest c whose simulated zeta-percentile of t2 is strictly below tau.
// Runs `frames` frames per candidate (a small leading warmup is carved out),
// same seed for every candidate. Throws InfeasibleError if no c <= L*N works.
int required_servers_by_simulation(const SystemConfig& config, double tau, double zeta,
                                   long frames, std::uint64_t seed);

}  // namespace bbupool
