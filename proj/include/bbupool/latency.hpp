#pragma once

#include <functional>
#include <vector>

#include "bbupool/config.hpp"
#include "bbupool/markov.hpp"

namespace bbupool {

// Stationary per-SR queuing-time law: an atom at zero plus Erlang components
// with a common rate (servers * mu). Component shapes are distinct; the shape
// of an SR landing at position l > servers is l - servers.
struct LatencyMixture {
    struct Component {
        double weight = 0.0;
        int shape = 0;
    };
    double atom_weight = 1.0;
    std::vector<Component> components;
    double rate_common = 0.0;
};

enum class DelayKind { queuing, system, total };  // t2, t2+t3, t1+t2+t3

struct LatencyCdf {
    DelayKind kind = DelayKind::queuing;
    std::function<double(double)> eval;
    double operator()(double t) const { return eval(t); }
};

// Per-SR queuing-delay mixture from the pre-arrival stationary distribution.
// Each (q, q') pair spreads weight uniformly over positions q+1..q'; pairs
// are weighted by their expected arrival count so the law is per arriving SR.
// lambda == 0 returns the pure atom.
LatencyMixture queuing_time_mixture(const OccupancyDistribution& pi, double lambda,
                                    int servers, double mu, double frame);

// CDF of the mixture at t: atom + sum of regularized-gamma Erlang terms.
double queuing_time_cdf(const LatencyMixture& mix, double t);

LatencyCdf queuing_cdf(const LatencyMixture& mix);

// Smallest t with CDF(t) >= zeta. Bracket doubling starts at 10*frame;
// bisection narrows to width tol. Throws NumericsError if the CDF plateaus
// below zeta (truncated mass).
double percentile(const LatencyCdf& cdf, double zeta, double frame, double tol);

// CDF of t2 + t3 with t3 ~ Exp(mu), in closed form per component
// (Erlang convolved with an independent exponential).
LatencyCdf system_time_cdf(const LatencyMixture& mix, double mu);

// CDF of t1 + t2 + t3 with t1 ~ Uniform[0, frame], by smoothing the system
// CDF over the frame window.
LatencyCdf total_time_cdf(const LatencyCdf& sys, double frame);

// Full pipeline for one RRH at a total pool size: stability gate (throws
// DivergenceError when pool utilization >= 1), proportional split, chain
// solve, mixture extraction.
LatencyMixture rrh_queuing_mixture(const SystemConfig& config, int total_servers,
                                   int rrh_index);

}  // namespace bbupool
