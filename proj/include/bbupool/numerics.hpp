#pragma once

#include <cstdint>
#include <functional>

namespace bbupool::num {

// log(k!) with a precomputed table for small k, lgamma beyond.
double log_factorial(long k);

// log C(n, k); requires 0 <= k <= n.
double log_binomial(long n, long k);

// Regularized lower incomplete gamma P(a, x). P(a, 0) = 0, P(a, inf) = 1.
double gamma_p(double a, double x);

// log P(a, x), finite even where P underflows to 0 (x << a).
double log_gamma_p(double a, double x);

// Erlang(shape, rate) CDF at t, i.e. P(shape, rate*t).
double erlang_cdf(long shape, double rate, double t);

// log density of Erlang(shape, rate) at t > 0.
double erlang_log_pdf(long shape, double rate, double t);

// CDF at t of Erlang(shape, a) + Exp(b) with independent summands.
// Requires a >= b > 0; the a == b case degenerates to Erlang(shape+1, a).
double erlang_plus_exp_cdf(long shape, double a, double b, double t);

struct QuadratureControl {
    double abs_tol = 1e-10;
    int max_intervals = 4000;
};

// Adaptive Gauss-Kronrod (7,15) integration of f over [lo, hi].
// Throws NumericsError if the interval cap is hit before abs_tol is met.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureControl& ctl);

// splitmix64 step; advances state and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed for the stream_index-th RNG stream derived from base_seed.
std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t stream_index);

}  // namespace bbupool::num
