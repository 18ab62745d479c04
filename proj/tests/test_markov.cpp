#include <cmath>

#include "doctest.h"

#include "bbupool/config.hpp"
#include "bbupool/errors.hpp"
#include "bbupool/markov.hpp"
#include "bbupool/numerics.hpp"

using namespace bbupool;

TEST_CASE("poisson pmf and upper tail") {
    CHECK(poisson_pmf(0, 0.0) == 1.0);
    CHECK(poisson_pmf(3, 0.0) == 0.0);
    CHECK(poisson_pmf(0, 10.0) == doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
    CHECK(poisson_pmf(10, 10.0) == doctest::Approx(0.1251100357211333).epsilon(1e-12));

    CHECK(poisson_upper_tail(0, 7.3) == 1.0);
    // P(K >= 3) for K ~ Poisson(1): 1 - e^{-1}(1 + 1 + 1/2)
    CHECK(poisson_upper_tail(3, 1.0) ==
          doctest::Approx(1.0 - 2.5 * std::exp(-1.0)).epsilon(1e-12));
    // Deep tail keeps relative accuracy instead of cancelling to zero.
    const double deep = poisson_upper_tail(60, 5.0);
    CHECK(deep > 0.0);
    CHECK(deep < 1e-30);
    // Tail and pmf stay consistent: P(K >= k) - P(K >= k+1) = pmf(k).
    for (int k : {0, 1, 4, 9, 20}) {
        CHECK(poisson_upper_tail(k, 6.0) - poisson_upper_tail(k + 1, 6.0) ==
              doctest::Approx(poisson_pmf(k, 6.0)).epsilon(1e-10));
    }
}

TEST_CASE("service completion probabilities, all transfers served") {
    // One transfer, two servers, mu_f = 2: survives with e^{-2}.
    CHECK(psi_all_served(1, 0, 2, 2.0) ==
          doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
    CHECK(psi_all_served(1, 1, 2, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    // Two transfers, both survive: e^{-4}.
    CHECK(psi_all_served(2, 2, 2, 2.0) == doctest::Approx(std::exp(-4.0)).epsilon(1e-12));
    CHECK(psi_all_served(0, 0, 5, 1.0) == 1.0);
    CHECK(psi_all_served(2, 3, 5, 1.0) == 0.0);
    CHECK_THROWS(psi_all_served(6, 2, 5, 1.0));

    // Rows are probability distributions.
    for (int o : {0, 1, 3, 5}) {
        double sum = 0.0;
        for (int j = 0; j <= o; ++j) {
            sum += psi_all_served(o, j, 5, 1.3);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("service completion probabilities, all servers busy throughout") {
    // Queue never idles a server: departures are Poisson(c mu_f).
    CHECK(psi_all_busy(3, 3, 2, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(psi_all_busy(3, 2, 2, 1.0) ==
          doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
    CHECK(psi_all_busy(10, 10, 2, 0.0) == 1.0);
    CHECK(psi_all_busy(3, 1, 2, 1.0) == 0.0);  // below c falls into the idle case
}

TEST_CASE("service completion probabilities, servers partially idle") {
    // Hand integration: o=3, c=2, mu_f=1, j=1 gives 4/e - 8/e^2.
    CHECK(psi_partial_idle(3, 1, 2, 1.0, 1e-10) ==
          doctest::Approx(0.3888354987928678).epsilon(1e-9));
    CHECK(psi_partial_idle(3, 2, 2, 1.0, 1e-10) == 0.0);  // j >= c is the busy case
    CHECK(psi_partial_idle(3, 1, 2, 0.0, 1e-10) == 0.0);
}

TEST_CASE("psi dispatcher covers the three regimes and sums to one") {
    for (int c : {1, 2, 4}) {
        for (double mu_f : {0.5, 1.0, 2.5}) {
            for (int o = 0; o <= c + 6; ++o) {
                double sum = 0.0;
                for (int j = 0; j <= o; ++j) {
                    const double p = psi(o, j, c, mu_f, 1e-10);
                    CHECK(p >= 0.0);
                    CHECK(p <= 1.0 + 1e-12);
                    sum += p;
                }
                CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("idle-case integral is continuous at the o = c boundary") {
    // Evaluating the busy-period integral at o = c (a length-1 Erlang phase)
    // must reproduce the thinning formula for j < c.
    num::QuadratureControl ctrl;
    ctrl.abs_tol = 1e-12;
    for (int c : {2, 3, 5}) {
        for (double mu_f : {0.5, 1.0, 2.0}) {
            for (int j = 0; j < c; ++j) {
                const double rate = c * mu_f;
                const double via_integral = num::integrate(
                    [&](double t) {
                        const double s = 1.0 - std::exp(-(1.0 - t) * mu_f);
                        const double keep = std::exp(-(1.0 - t) * j * mu_f);
                        return std::exp(num::log_binomial(c - 1, j)) * keep *
                               std::pow(s, c - 1 - j) *
                               std::exp(num::erlang_log_pdf(1, rate, t));
                    },
                    0.0, 1.0, ctrl);
                CHECK(via_integral ==
                      doctest::Approx(psi_all_served(c, j, c, mu_f)).epsilon(1e-8));
            }
        }
    }
}

namespace {
SystemConfig small_config(double lambda, int truncation) {
    SystemConfig cfg;
    cfg.num_rrh = 2;
    cfg.max_concurrent = 25;
    cfg.frame_duration = 10.0;
    cfg.service_rate = 0.2;
    cfg.arrival_rates = {lambda, lambda};
    cfg.queue_truncation = truncation;
    return cfg;
}
}  // namespace

TEST_CASE("transition matrix rows are stochastic") {
    SystemConfig cfg = small_config(1.0, 8);
    const auto tm = build_transition_matrix(cfg, 0, 3);
    CHECK(tm.q_max == 11);
    CHECK(tm.rows.rows() == 12);
    for (int i = 0; i <= tm.q_max; ++i) {
        CHECK(tm.rows.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(tm.rows.row(i).minCoeff() >= 0.0);
    }
}

TEST_CASE("zero arrivals reduce the transition matrix to pure service") {
    SystemConfig cfg = small_config(0.0, 5);
    const auto tm = build_transition_matrix(cfg, 0, 2);
    // Row 0 is absorbing at 0; every row equals the service kernel.
    CHECK(tm.rows(0, 0) == doctest::Approx(1.0));
    for (int i = 0; i <= tm.q_max; ++i) {
        for (int j = 0; j <= tm.q_max; ++j) {
            CHECK(tm.rows(i, j) ==
                  doctest::Approx(psi(i, j, tm.servers, cfg.mu_f(), 1e-10)).epsilon(1e-12));
        }
    }
}

TEST_CASE("state space guard rejects oversized truncations") {
    SystemConfig cfg = small_config(1.0, 5000);
    CHECK_THROWS_AS(build_transition_matrix(cfg, 0, 3), ConfigError);
}

TEST_CASE("stationary distribution of a doubly stochastic chain is uniform") {
    TransitionMatrix tm;
    tm.servers = 1;
    tm.q_max = 1;
    tm.rows.resize(2, 2);
    tm.rows << 0.3, 0.7, 0.7, 0.3;
    const auto pi = stationary_distribution(tm, 1e-13);
    CHECK(pi.kind == OccupancyKind::stationary_pre_arrival);
    CHECK(pi.probs(0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(pi.probs(1) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("stationary distribution with zero arrivals is the empty state") {
    SystemConfig cfg = small_config(0.0, 5);
    const auto tm = build_transition_matrix(cfg, 0, 2);
    const auto pi = stationary_distribution(tm, cfg.tolerances.power_iter_tol);
    CHECK(pi.probs(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pi.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stationary occupancy grows with the arrival rate") {
    double prev_mean = -1.0;
    for (double lambda : {0.3, 0.9, 1.5, 2.1}) {
        SystemConfig cfg = small_config(lambda, 15);
        cfg.service_rate = 0.1;  // mu_f = 1
        const auto tm = build_transition_matrix(cfg, 0, 3);
        const auto pi = stationary_distribution(tm, 1e-12);
        double mean = 0.0;
        for (int q = 0; q <= tm.q_max; ++q) {
            mean += q * pi.probs(q);
        }
        CHECK(mean > prev_mean);
        prev_mean = mean;
    }
}

TEST_CASE("overloaded truncated chain still solves, mass piles near the cap") {
    // Callers gate on pool stability before trusting these numbers; the solver
    // itself converges on any finite truncation.
    SystemConfig cfg = small_config(30.0, 40);
    const auto tm = build_transition_matrix(cfg, 0, 10);
    const auto pi = stationary_distribution(tm, 1e-12);
    CHECK(pi.probs.sum() == doctest::Approx(1.0).epsilon(1e-10));
    // Offered load is 1.5x capacity, so the backlog parks well above the
    // server count. The pre-arrival cap state itself stays rare (it needs a
    // zero-departure frame), but arrivals overflow the truncation most frames.
    double mean = 0.0;
    for (int q = 0; q <= tm.q_max; ++q) {
        mean += q * pi.probs(q);
    }
    CHECK(mean > 2.0 * tm.servers);
    const auto post = post_arrival_distribution(pi, 30.0, tm.q_max);
    CHECK(post.probs(tm.q_max) > 0.5);
}

TEST_CASE("post-arrival distribution from the empty state") {
    OccupancyDistribution pre;
    pre.kind = OccupancyKind::stationary_pre_arrival;
    pre.probs = Eigen::VectorXd::Zero(4);
    pre.probs(0) = 1.0;
    const auto post = post_arrival_distribution(pre, 1.0, 3);
    CHECK(post.kind == OccupancyKind::post_arrival);
    const double e1 = std::exp(-1.0);
    CHECK(post.probs(0) == doctest::Approx(e1).epsilon(1e-12));
    CHECK(post.probs(1) == doctest::Approx(e1).epsilon(1e-12));
    CHECK(post.probs(2) == doctest::Approx(e1 / 2.0).epsilon(1e-12));
    CHECK(post.probs(3) == doctest::Approx(1.0 - 2.5 * e1).epsilon(1e-12));
    CHECK(post.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(post_arrival_distribution(post, 1.0, 3));
}

TEST_CASE("truncation level is converged at the reference operating point") {
    // Doubling the tail room beyond the default changes visible states by
    // less than 1e-6, so the default truncation is adequate.
    SystemConfig coarse = small_config(10.0, 100);
    SystemConfig fine = small_config(10.0, 200);
    const auto pi_c = stationary_distribution(build_transition_matrix(coarse, 0, 10),
                                              1e-12);
    const auto pi_f =
        stationary_distribution(build_transition_matrix(fine, 0, 10), 1e-12);
    for (int i = 0; i <= 20; ++i) {
        CHECK(pi_c.probs(i) == doctest::Approx(pi_f.probs(i)).epsilon(1e-6));
    }
    CHECK(pi_f.probs(pi_f.probs.size() - 1) < 1e-8);
}
