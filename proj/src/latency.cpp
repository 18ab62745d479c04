#include "bbupool/latency.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bbupool/errors.hpp"
#include "bbupool/numerics.hpp"

namespace bbupool {

LatencyMixture queuing_time_mixture(const OccupancyDistribution& pi, double lambda,
                                    int servers, double mu, double frame) {
    (void)frame;
    if (pi.kind != OccupancyKind::stationary_pre_arrival) {
        throw ConfigError("queuing_time_mixture: input must be pre-arrival stationary");
    }
    if (servers < 1) {
        throw ConfigError("queuing_time_mixture: servers must be >= 1");
    }
    LatencyMixture mix;
    mix.rate_common = servers * mu;
    if (lambda == 0.0) {
        return mix;  // pure atom by convention, no arrivals to condition on
    }

    const int q_max = static_cast<int>(pi.probs.size()) - 1;
    // Position weight w(l) = sum_{q < l} pi_q P(v >= l - q): a pair (q, q')
    // contributes its probability once to every position q+1..q', which is
    // the uniform-position spread with pairs weighted by arrival count.
    std::vector<double> tail(q_max + 2, 0.0);
    for (int m = 1; m <= q_max + 1; ++m) {
        tail[m] = poisson_upper_tail(m, lambda);
    }
    std::vector<double> w(q_max + 1, 0.0);
    for (int q = 0; q <= q_max; ++q) {
        const double pq = pi.probs(q);
        if (pq == 0.0) {
            continue;
        }
        for (int l = q + 1; l <= q_max; ++l) {
            w[l] += pq * tail[l - q];
        }
    }

    double total = 0.0;
    for (int l = 1; l <= q_max; ++l) {
        total += w[l];
    }
    if (total <= 0.0) {
        return mix;  // no arriving SR can exist; keep the pure atom
    }
    double atom = 0.0;
    for (int l = 1; l <= std::min(servers, q_max); ++l) {
        atom += w[l];
    }
    mix.atom_weight = atom / total;
    for (int l = servers + 1; l <= q_max; ++l) {
        const double weight = w[l] / total;
        if (weight > 0.0) {
            mix.components.push_back({weight, l - servers});
        }
    }
    return mix;
}

double queuing_time_cdf(const LatencyMixture& mix, double t) {
    if (t < 0.0) {
        return 0.0;
    }
    double acc = mix.atom_weight;
    for (const auto& comp : mix.components) {
        acc += comp.weight * num::erlang_cdf(comp.shape, mix.rate_common, t);
    }
    return std::min(acc, 1.0);
}

LatencyCdf queuing_cdf(const LatencyMixture& mix) {
    LatencyCdf cdf;
    cdf.kind = DelayKind::queuing;
    cdf.eval = [mix](double t) { return queuing_time_cdf(mix, t); };
    return cdf;
}

double percentile(const LatencyCdf& cdf, double zeta, double frame, double tol) {
    if (!(zeta > 0.0 && zeta < 1.0)) {
        throw ConfigError("percentile: zeta must lie in (0, 1)");
    }
    if (cdf(0.0) >= zeta) {
        return 0.0;
    }
    double hi = 10.0 * frame;
    int doublings = 0;
    while (cdf(hi) < zeta) {
        hi *= 2.0;
        if (++doublings > 64) {
            throw NumericsError("percentile: bracket growth exhausted; CDF reaches " +
                                std::to_string(cdf(hi)) + " below zeta (truncation plateau)");
        }
    }
    double lo = 0.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (cdf(mid) >= zeta) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

LatencyCdf system_time_cdf(const LatencyMixture& mix, double mu) {
    if (!(mu > 0.0)) {
        throw ConfigError("system_time_cdf: mu must be > 0");
    }
    LatencyCdf cdf;
    cdf.kind = DelayKind::system;
    cdf.eval = [mix, mu](double t) {
        if (t <= 0.0) {
            return 0.0;
        }
        double acc = mix.atom_weight * (1.0 - std::exp(-mu * t));
        for (const auto& comp : mix.components) {
            acc += comp.weight * num::erlang_plus_exp_cdf(comp.shape, mix.rate_common, mu, t);
        }
        return std::min(acc, 1.0);
    };
    return cdf;
}

LatencyCdf total_time_cdf(const LatencyCdf& sys, double frame) {
    if (sys.kind != DelayKind::system) {
        throw ConfigError("total_time_cdf: input must be the t2+t3 CDF");
    }
    if (!(frame > 0.0)) {
        throw ConfigError("total_time_cdf: frame must be > 0");
    }
    LatencyCdf cdf;
    cdf.kind = DelayKind::total;
    const auto inner = sys.eval;
    cdf.eval = [inner, frame](double t) {
        if (t <= 0.0) {
            return 0.0;
        }
        const double lo = std::max(0.0, t - frame);
        num::QuadratureControl ctl;
        ctl.abs_tol = 1e-9;
        const double area = num::integrate(inner, lo, t, ctl);
        return std::min(area / frame, 1.0);
    };
    return cdf;
}

LatencyMixture rrh_queuing_mixture(const SystemConfig& config, int total_servers,
                                   int rrh_index) {
    const StabilityReport rep = stability_check(config, total_servers);
    if (rep.rho_bbu >= 1.0) {
        throw DivergenceError("chain divergent: pool utilization " +
                              std::to_string(rep.rho_bbu) + " >= 1 at c = " +
                              std::to_string(total_servers));
    }
    const int share = per_rrh_servers(config, total_servers, rrh_index);
    if (share < 1) {
        throw ConfigError("rrh_queuing_mixture: proportional split allocates 0 servers to rrh " +
                          std::to_string(rrh_index));
    }
    const TransitionMatrix tm = build_transition_matrix(config, rrh_index, share);
    const OccupancyDistribution pi =
        stationary_distribution(tm, config.tolerances.power_iter_tol);
    return queuing_time_mixture(pi, config.arrival_rates[rrh_index], share,
                                config.service_rate, config.frame_duration);
}

}  // namespace bbupool
