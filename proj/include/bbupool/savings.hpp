#pragma once

#include "bbupool/config.hpp"

namespace bbupool {

enum class Policy { long_term, short_term };

struct SavingsReport {
    Policy policy = Policy::long_term;
    int servers_provisioned = 0;   // long-term only; 0 for short-term
    double normalized_cost = 0.0;  // c_min/(L*N), or expected clipped load share
    double savings = 0.0;          // 1 - normalized_cost
    double upper_bound = 0.0;      // 1 - rho_bbu at the baseline c = L*N
};

// Smallest total c that is stable, allocates every RRH at least one server,
// and meets Pr(t2 < tau) >= zeta on every RRH chain. Linear search upward.
// Throws InfeasibleError (carrying the best achieved CDF) if no c <= L*N works.
int long_term_min_servers(const SystemConfig& config, double tau, double zeta);

SavingsReport long_term_savings(const SystemConfig& config, double tau, double zeta);

// Expected short-term savings with per-RRH chains at c-hat = L: for each RRH
// 1 - E[min(q', L)]/L, averaged across RRHs (equal concurrency caps).
SavingsReport short_term_expected_savings(const SystemConfig& config);

// Smallest c with a stable report and a nonzero share for every RRH.
int stability_floor(const SystemConfig& config);

}  // namespace bbupool
