#pragma once

#include <stdexcept>
#include <string>

namespace bbupool {

// Invalid parameters, malformed config files, out-of-range arguments.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature subdivision cap or percentile bracket growth exhausted.
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pool utilization >= 1: the occupancy chain has no stationary regime.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Power iteration hit its iteration cap without reaching tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A feasibility search exhausted its domain. Carries the best point seen.
struct InfeasibleError : std::runtime_error {
    int best_servers = 0;
    double best_cdf = 0.0;

    InfeasibleError(const std::string& msg, int servers, double cdf)
        : std::runtime_error(msg), best_servers(servers), best_cdf(cdf) {}
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bbupool
