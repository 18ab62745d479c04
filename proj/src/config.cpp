#include "bbupool/config.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "bbupool/errors.hpp"

namespace bbupool {

double SystemConfig::total_arrival_rate() const {
    return std::accumulate(arrival_rates.begin(), arrival_rates.end(), 0.0);
}

void SystemConfig::validate() const {
    if (num_rrh < 1) {
        throw ConfigError("num_rrh must be >= 1");
    }
    if (max_concurrent < 1) {
        throw ConfigError("max_concurrent must be >= 1");
    }
    if (!(frame_duration > 0.0)) {
        throw ConfigError("frame_duration must be > 0");
    }
    if (!(service_rate > 0.0)) {
        throw ConfigError("service_rate must be > 0");
    }
    if (arrival_rates.size() != static_cast<std::size_t>(num_rrh)) {
        throw ConfigError("arrival_rates must have exactly num_rrh entries");
    }
    for (double lam : arrival_rates) {
        if (!(lam >= 0.0) || !std::isfinite(lam)) {
            throw ConfigError("arrival_rates entries must be finite and >= 0");
        }
    }
    if (queue_truncation < 1) {
        throw ConfigError("queue_truncation must be >= 1");
    }
    const double tols[] = {tolerances.quadrature_abs_tol, tolerances.poisson_tail_mass,
                           tolerances.power_iter_tol, tolerances.percentile_tol};
    const char* names[] = {"quadrature_abs_tol", "poisson_tail_mass", "power_iter_tol",
                           "percentile_tol"};
    for (int i = 0; i < 4; ++i) {
        if (!(tols[i] > 0.0 && tols[i] < 1.0)) {
            throw ConfigError(std::string(names[i]) + " must lie in (0, 1)");
        }
    }
}

StabilityReport stability_check(const SystemConfig& config, int servers) {
    config.validate();
    if (servers < 1) {
        throw ConfigError("stability_check: servers must be >= 1");
    }
    const long cap = static_cast<long>(config.max_concurrent) * config.num_rrh;
    if (servers > cap) {
        throw ConfigError("stability_check: servers exceed the air-interface limit L*N");
    }

    StabilityReport rep;
    const double mu_f = config.mu_f();
    rep.rho_bbu = config.total_arrival_rate() / (servers * mu_f);
    rep.rho_rrh = Eigen::VectorXd(config.num_rrh);
    bool stable = rep.rho_bbu < 1.0;
    for (int j = 0; j < config.num_rrh; ++j) {
        rep.rho_rrh[j] = config.arrival_rates[j] / (config.max_concurrent * mu_f);
        stable = stable && rep.rho_rrh[j] < 1.0;
    }
    rep.stable = stable;
    return rep;
}

int per_rrh_servers(const SystemConfig& config, int total_servers, int rrh_index) {
    config.validate();
    if (rrh_index < 0 || rrh_index >= config.num_rrh) {
        throw ConfigError("per_rrh_servers: rrh_index out of range");
    }
    const long cap = static_cast<long>(config.max_concurrent) * config.num_rrh;
    if (total_servers < 1 || total_servers > cap) {
        throw ConfigError("per_rrh_servers: total_servers outside [1, L*N]");
    }
    const double total_rate = config.total_arrival_rate();
    if (total_rate == 0.0) {
        return total_servers / config.num_rrh;
    }
    return static_cast<int>(
        std::floor(config.arrival_rates[rrh_index] / total_rate * total_servers));
}

SystemConfig rescaled_frame(const SystemConfig& config, double new_frame) {
    if (!(new_frame > 0.0)) {
        throw ConfigError("rescaled_frame: new_frame must be > 0");
    }
    SystemConfig out = config;
    const double scale = new_frame / config.frame_duration;
    out.frame_duration = new_frame;
    for (double& lam : out.arrival_rates) {
        lam *= scale;
    }
    return out;
}

}  // namespace bbupool
