#pragma once

#include <Eigen/Dense>

#include "bbupool/config.hpp"

namespace bbupool {

// Poisson pmf lambda^k e^-lambda / k!, evaluated in log space.
double poisson_pmf(long k, double lambda);

// Upper tail P(V >= k) for V ~ Poisson(lambda).
double poisson_upper_tail(long k, double lambda);

// One-frame service transition kernel psi_{o,j}: probability that o transfers
// present right after arrivals leave j still in the system at the next frame
// boundary, with `servers` servers and per-frame per-server load mu_f.
//
// Case split on the initial occupancy o:
//   o <= servers : every transfer is in service the whole frame, each
//                  survives independently with probability e^-mu_f.
//   o >  servers, j >= servers : all servers stay busy, departures within the
//                  frame are Poisson(servers * mu_f).
//   o >  servers, j <  servers : the pool drains below full load mid-frame;
//                  conditioned on the Erlang(o-servers+1, servers*mu_f)
//                  first-idle instant, the remaining servers-1 transfers
//                  thin binomially over the rest of the frame.
double psi_all_served(int occupied, int j, int servers, double mu_f);
double psi_all_busy(int occupied, int j, int servers, double mu_f);
double psi_partial_idle(int occupied, int j, int servers, double mu_f, double quad_tol);

// Dispatch over the three cases; zero outside their union.
double psi(int occupied, int j, int servers, double mu_f, double quad_tol);

// Row-stochastic transition matrix over pre-arrival occupancy 0..q_max for
// one RRH's chain with a fixed per-RRH server share.
struct TransitionMatrix {
    int servers = 0;         // c-hat for this chain
    int q_max = 0;           // servers + M
    Eigen::MatrixXd rows;    // (q_max+1) x (q_max+1), entry (i,j) = p_ij
};

TransitionMatrix build_transition_matrix(const SystemConfig& config, int rrh_index,
                                         int servers);

enum class OccupancyKind { stationary_pre_arrival, post_arrival };

struct OccupancyDistribution {
    Eigen::VectorXd probs;  // over states 0..q_max
    OccupancyKind kind = OccupancyKind::stationary_pre_arrival;
};

// Stationary distribution by power iteration started from state 0.
// Returns pi with ||pi P - pi||_1 < tol; iteration cap 1e6.
OccupancyDistribution stationary_distribution(const TransitionMatrix& matrix, double tol);

// Occupancy immediately after a frame's arrivals: Poisson increments,
// residual mass lumped at q_max.
OccupancyDistribution post_arrival_distribution(const OccupancyDistribution& pi,
                                                double lambda, int q_max);

}  // namespace bbupool
