#include "bbupool/savings.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <string>
#include <utility>

#include "bbupool/errors.hpp"
#include "bbupool/latency.hpp"
#include "bbupool/markov.hpp"

namespace bbupool {

namespace {

std::uint64_t rate_key(double lambda) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(lambda));
    std::memcpy(&bits, &lambda, sizeof(bits));
    return bits;
}

double upper_bound_at_full_pool(const SystemConfig& config) {
    const double baseline = static_cast<double>(config.max_concurrent) * config.num_rrh;
    return 1.0 - config.total_arrival_rate() / (baseline * config.mu_f());
}

}  // namespace

int stability_floor(const SystemConfig& config) {
    config.validate();
    const int cap = config.max_concurrent * config.num_rrh;
    for (int c = 1; c <= cap; ++c) {
        if (!stability_check(config, c).stable) {
            continue;
        }
        bool all_assigned = true;
        for (int j = 0; j < config.num_rrh; ++j) {
            if (per_rrh_servers(config, c, j) < 1) {
                all_assigned = false;
                break;
            }
        }
        if (all_assigned) {
            return c;
        }
    }
    throw InfeasibleError("stability_floor: no c <= L*N is stable with nonzero shares");
}

int long_term_min_servers(const SystemConfig& config, double tau, double zeta) {
    if (!(tau > 0.0)) {
        throw ConfigError("long_term_min_servers: tau must be > 0");
    }
    if (!(zeta > 0.0 && zeta < 1.0)) {
        throw ConfigError("long_term_min_servers: zeta must lie in (0, 1)");
    }
    const int cap = config.max_concurrent * config.num_rrh;
    const int start = stability_floor(config);

    // Chains repeat across consecutive c (floors change every other step);
    // cache mixtures keyed by (share, lambda).
    std::map<std::pair<int, std::uint64_t>, LatencyMixture> cache;
    double best_cdf = -1.0;
    int best_c = start;
    for (int c = start; c <= cap; ++c) {
        double min_cdf = 2.0;
        for (int j = 0; j < config.num_rrh; ++j) {
            const int share = per_rrh_servers(config, c, j);
            const double lambda = config.arrival_rates[j];
            const auto key = std::make_pair(share, rate_key(lambda));
            auto it = cache.find(key);
            if (it == cache.end()) {
                it = cache.emplace(key, rrh_queuing_mixture(config, c, j)).first;
            }
            min_cdf = std::min(min_cdf, queuing_time_cdf(it->second, tau));
        }
        if (min_cdf >= zeta) {
            return c;
        }
        if (min_cdf > best_cdf) {
            best_cdf = min_cdf;
            best_c = c;
        }
    }
    throw InfeasibleError("long_term_min_servers: no feasible c <= L*N; best Pr(t2<tau) = " +
                              std::to_string(best_cdf) + " at c = " + std::to_string(best_c),
                          best_c, best_cdf);
}

SavingsReport long_term_savings(const SystemConfig& config, double tau, double zeta) {
    const int c_min = long_term_min_servers(config, tau, zeta);
    const double baseline = static_cast<double>(config.max_concurrent) * config.num_rrh;
    SavingsReport rep;
    rep.policy = Policy::long_term;
    rep.servers_provisioned = c_min;
    rep.normalized_cost = c_min / baseline;
    rep.savings = 1.0 - rep.normalized_cost;
    rep.upper_bound = upper_bound_at_full_pool(config);
    return rep;
}

SavingsReport short_term_expected_savings(const SystemConfig& config) {
    config.validate();
    const int pool = config.max_concurrent * config.num_rrh;
    const StabilityReport stab = stability_check(config, pool);
    if (!stab.stable) {
        throw DivergenceError("short_term_expected_savings: system unstable at c = L*N");
    }

    std::map<std::uint64_t, double> cache;  // lambda -> per-RRH savings
    double savings_sum = 0.0;
    for (int j = 0; j < config.num_rrh; ++j) {
        const double lambda = config.arrival_rates[j];
        auto it = cache.find(rate_key(lambda));
        if (it == cache.end()) {
            const int share = config.max_concurrent;  // c-hat = L per RRH
            const TransitionMatrix tm = build_transition_matrix(config, j, share);
            const OccupancyDistribution pi =
                stationary_distribution(tm, config.tolerances.power_iter_tol);
            const OccupancyDistribution post =
                post_arrival_distribution(pi, lambda, tm.q_max);
            double clipped_mean = 0.0;
            for (int q = 0; q <= tm.q_max; ++q) {
                clipped_mean += std::min(q, config.max_concurrent) * post.probs(q);
            }
            it = cache.emplace(rate_key(lambda), 1.0 - clipped_mean / config.max_concurrent)
                     .first;
        }
        savings_sum += it->second;
    }

    SavingsReport rep;
    rep.policy = Policy::short_term;
    rep.servers_provisioned = 0;
    rep.savings = savings_sum / config.num_rrh;
    rep.normalized_cost = 1.0 - rep.savings;
    rep.upper_bound = upper_bound_at_full_pool(config);
    return rep;
}

}  // namespace bbupool
