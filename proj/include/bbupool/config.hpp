#pragma once

#include <Eigen/Dense>

#include <vector>

namespace bbupool {

struct Tolerances {
    double quadrature_abs_tol = 1e-10;
    double poisson_tail_mass = 1e-12;
    double power_iter_tol = 1e-12;   // L1 residual of the stationary solve
    double percentile_tol = 1e-9;    // bisection bracket width
};

// All model parameters. Arrival rates are per frame; per-unit-time intensity
// is arrival_rates[j] / frame_duration.
struct SystemConfig {
    int num_rrh = 2;
    int max_concurrent = 25;       // L, per-RRH concurrency cap
    double frame_duration = 10.0;  // F, in resource-time units
    double service_rate = 0.2;     // mu, per resource-time unit
    std::vector<double> arrival_rates = {10.0, 10.0};
    int queue_truncation = 200;    // M, finite queue length for numerics
    Tolerances tolerances;

    double mu_f() const { return service_rate * frame_duration; }
    double total_arrival_rate() const;

    // Throws ConfigError naming the violated field.
    void validate() const;
};

struct StabilityReport {
    double rho_bbu = 0.0;
    Eigen::VectorXd rho_rrh;
    bool stable = false;
};

// Pool and per-RRH utilizations for a given total server count.
// Rejects servers < 1 and servers > L*N.
StabilityReport stability_check(const SystemConfig& config, int servers);

// Proportional server split floor(lambda_j / sum(lambda) * total); an even
// split when the total arrival rate is zero.
int per_rrh_servers(const SystemConfig& config, int total_servers, int rrh_index);

// Copy of config with a new frame duration, holding the per-unit-time
// arrival intensity fixed (per-frame rates rescaled by new_frame / old).
SystemConfig rescaled_frame(const SystemConfig& config, double new_frame);

}  // namespace bbupool
