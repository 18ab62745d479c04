#include "bbupool/markov.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "bbupool/errors.hpp"
#include "bbupool/numerics.hpp"

namespace bbupool {

namespace {

constexpr int kMaxStates = 4001;
constexpr long kPowerIterationCap = 1000000;

}  // namespace

double poisson_pmf(long k, double lambda) {
    if (k < 0) {
        return 0.0;
    }
    if (lambda < 0.0) {
        throw ConfigError("poisson_pmf: lambda must be >= 0");
    }
    if (lambda == 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    return std::exp(k * std::log(lambda) - lambda - num::log_factorial(k));
}

double poisson_upper_tail(long k, double lambda) {
    if (k <= 0) {
        return 1.0;
    }
    if (lambda == 0.0) {
        return 0.0;
    }
    if (static_cast<double>(k) > lambda) {
        // Sum upward from k; preserves tails far below machine epsilon of 1.
        double term = poisson_pmf(k, lambda);
        double sum = term;
        for (long m = k; term > 0.0; ++m) {
            term *= lambda / static_cast<double>(m + 1);
            sum += term;
            if (term < sum * 1e-18) {
                break;
            }
        }
        return sum;
    }
    double term = std::exp(-lambda);
    double cum = term;
    for (long m = 0; m + 1 < k; ++m) {
        term *= lambda / static_cast<double>(m + 1);
        cum += term;
    }
    return std::max(0.0, 1.0 - cum);
}

double psi_all_served(int occupied, int j, int servers, double mu_f) {
    if (occupied > servers) {
        throw ConfigError("psi_all_served: requires occupied <= servers");
    }
    if (j < 0 || j > occupied) {
        return 0.0;
    }
    if (mu_f == 0.0) {
        return j == occupied ? 1.0 : 0.0;
    }
    double log_p = num::log_binomial(occupied, j) - j * mu_f;
    if (occupied > j) {
        log_p += (occupied - j) * std::log1p(-std::exp(-mu_f));
    }
    return std::exp(log_p);
}

double psi_all_busy(int occupied, int j, int servers, double mu_f) {
    if (occupied <= servers || j < servers || j > occupied) {
        return 0.0;
    }
    return poisson_pmf(occupied - j, servers * mu_f);
}

double psi_partial_idle(int occupied, int j, int servers, double mu_f, double quad_tol) {
    if (occupied <= servers || j < 0 || j >= servers) {
        return 0.0;
    }
    if (mu_f <= 0.0) {
        return 0.0;
    }
    const double c = servers;
    const double log_choose = num::log_binomial(servers - 1, j);
    const long shape = occupied - servers + 1;
    const double rate = c * mu_f;
    // Frame-normalized time t: the pool first drops below full load at t
    // (Erlang density), then j of the remaining c-1 transfers survive 1-t.
    auto integrand = [&](double t) {
        const double rest = 1.0 - t;
        double log_val = log_choose - rest * j * mu_f + num::erlang_log_pdf(shape, rate, t);
        const int failures = servers - 1 - j;
        if (failures > 0) {
            const double lf = std::log1p(-std::exp(-rest * mu_f));
            if (!std::isfinite(lf)) {
                return 0.0;
            }
            log_val += failures * lf;
        }
        return std::isfinite(log_val) ? std::exp(log_val) : 0.0;
    };
    num::QuadratureControl ctl;
    ctl.abs_tol = quad_tol;
    return num::integrate(integrand, 0.0, 1.0, ctl);
}

double psi(int occupied, int j, int servers, double mu_f, double quad_tol) {
    if (j < 0 || j > occupied) {
        return 0.0;
    }
    if (occupied <= servers) {
        return psi_all_served(occupied, j, servers, mu_f);
    }
    if (j >= servers) {
        return psi_all_busy(occupied, j, servers, mu_f);
    }
    return psi_partial_idle(occupied, j, servers, mu_f, quad_tol);
}

TransitionMatrix build_transition_matrix(const SystemConfig& config, int rrh_index,
                                         int servers) {
    config.validate();
    if (rrh_index < 0 || rrh_index >= config.num_rrh) {
        throw ConfigError("build_transition_matrix: rrh_index out of range");
    }
    if (servers < 1) {
        throw ConfigError("build_transition_matrix: servers must be >= 1");
    }
    const int q_max = servers + config.queue_truncation;
    if (q_max + 1 > kMaxStates) {
        throw ConfigError("build_transition_matrix: state space exceeds matrix limit");
    }

    const double lambda = config.arrival_rates[rrh_index];
    const double mu_f = config.mu_f();
    const double quad_tol = config.tolerances.quadrature_abs_tol;
    const int n = q_max + 1;

    Eigen::MatrixXd psi_table = Eigen::MatrixXd::Zero(n, n);
    for (int o = 0; o <= q_max; ++o) {
        for (int j = 0; j <= o; ++j) {
            psi_table(o, j) = psi(o, j, servers, mu_f, quad_tol);
        }
    }

    TransitionMatrix tm;
    tm.servers = servers;
    tm.q_max = q_max;
    tm.rows = Eigen::MatrixXd::Zero(n, n);

    const double tail_mass = config.tolerances.poisson_tail_mass;
    for (int i = 0; i <= q_max; ++i) {
        auto row = tm.rows.row(i);
        const int saturate_at = q_max - i;
        double pmf = std::exp(-lambda);
        double cum = 0.0;
        for (int k = 0;; ++k) {
            if (k == saturate_at) {
                // All arrival counts >= k are clipped to the full queue.
                row += (1.0 - cum) * psi_table.row(q_max);
                break;
            }
            if (cum + pmf >= 1.0 - tail_mass) {
                // Residual tail goes to the last retained term.
                row += (1.0 - cum) * psi_table.row(i + k);
                break;
            }
            row += pmf * psi_table.row(i + k);
            cum += pmf;
            pmf *= lambda / (k + 1);
        }
        const double sum = row.sum();
        const double defect = std::abs(sum - 1.0);
        if (defect > 1e-9) {
            throw NumericsError("build_transition_matrix: row " + std::to_string(i) +
                                " defect " + std::to_string(defect) + " exceeds 1e-9");
        }
        if (defect > 1e-12) {
            row /= sum;
        }
    }
    return tm;
}

OccupancyDistribution stationary_distribution(const TransitionMatrix& matrix, double tol) {
    if (!(tol > 0.0)) {
        throw ConfigError("stationary_distribution: tol must be > 0");
    }
    const int n = matrix.q_max + 1;
    const Eigen::MatrixXd pt = matrix.rows.transpose();
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(n);
    pi(0) = 1.0;
    Eigen::VectorXd next(n);

    for (long iter = 0; iter < kPowerIterationCap; ++iter) {
        next.noalias() = pt * pi;
        const double delta = (next - pi).lpNorm<1>();
        pi.swap(next);
        if ((iter & 127) == 0 || delta < tol) {
            pi /= pi.sum();
        }
        if (delta < tol) {
            OccupancyDistribution out;
            out.probs = pi;
            out.kind = OccupancyKind::stationary_pre_arrival;
            return out;
        }
    }
    throw ConvergenceError(
        "stationary_distribution: iteration cap reached; verify pool utilization < 1");
}

OccupancyDistribution post_arrival_distribution(const OccupancyDistribution& pi,
                                                double lambda, int q_max) {
    if (pi.kind != OccupancyKind::stationary_pre_arrival) {
        throw ConfigError("post_arrival_distribution: input must be pre-arrival stationary");
    }
    if (pi.probs.size() != q_max + 1) {
        throw ConfigError("post_arrival_distribution: q_max does not match input size");
    }
    std::vector<double> pmf(q_max + 1);
    for (int d = 0; d <= q_max; ++d) {
        pmf[d] = poisson_pmf(d, lambda);
    }
    OccupancyDistribution out;
    out.probs = Eigen::VectorXd::Zero(q_max + 1);
    for (int q = 0; q <= q_max; ++q) {
        const double pq = pi.probs(q);
        if (pq == 0.0) {
            continue;
        }
        for (int qp = q; qp < q_max; ++qp) {
            out.probs(qp) += pq * pmf[qp - q];
        }
        out.probs(q_max) += pq * poisson_upper_tail(q_max - q, lambda);
    }
    out.kind = OccupancyKind::post_arrival;
    return out;
}

}  // namespace bbupool
