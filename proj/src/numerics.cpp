#include "bbupool/numerics.hpp"

#include <unsupported/Eigen/SpecialFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bbupool/errors.hpp"

namespace bbupool::num {

namespace {

constexpr int kLogFactTableSize = 4096;

const std::vector<double>& log_fact_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kLogFactTableSize);
        t[0] = 0.0;
        for (int k = 1; k < kLogFactTableSize; ++k) {
            t[k] = t[k - 1] + std::log(static_cast<double>(k));
        }
        return t;
    }();
    return table;
}

// Gauss-Kronrod (7,15) nodes and weights on [-1,1]; nonnegative abscissae,
// xk[7] = 0. Gauss weights apply to the odd-indexed Kronrod nodes.
constexpr double kXk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    double kronrod;
    double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = kWk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXk[i];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kron += kWk[i] * (f1 + f2);
        if (i % 2 == 1) {
            gauss += kWg[(i - 1) / 2] * (f1 + f2);
        }
    }
    kron *= h;
    gauss *= h;
    return {kron, std::abs(kron - gauss)};
}

}  // namespace

double log_factorial(long k) {
    if (k < 0) {
        throw ConfigError("log_factorial: negative argument");
    }
    if (k < kLogFactTableSize) {
        return log_fact_table()[static_cast<std::size_t>(k)];
    }
    return std::lgamma(static_cast<double>(k) + 1.0);
}

double log_binomial(long n, long k) {
    if (k < 0 || k > n) {
        throw ConfigError("log_binomial: k outside [0, n]");
    }
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double gamma_p(double a, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    return Eigen::numext::igamma(a, x);
}

double log_gamma_p(double a, double x) {
    if (x <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double p = gamma_p(a, x);
    if (p > 1e-280) {
        return std::log(p);
    }
    // Underflow regime has x << a; the ascending series converges fast.
    // P(a,x) = x^a e^-x / Gamma(a+1) * sum_n x^n / prod_{m<=n}(a+m)
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < 1e-18 * sum) {
            break;
        }
    }
    return a * std::log(x) - x - std::lgamma(a + 1.0) + std::log(sum);
}

double erlang_cdf(long shape, double rate, double t) {
    if (t <= 0.0) {
        return 0.0;
    }
    return gamma_p(static_cast<double>(shape), rate * t);
}

double erlang_log_pdf(long shape, double rate, double t) {
    if (t <= 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double k = static_cast<double>(shape);
    return k * std::log(rate) + (k - 1.0) * std::log(t) - rate * t - log_factorial(shape - 1);
}

double erlang_plus_exp_cdf(long shape, double a, double b, double t) {
    if (t <= 0.0) {
        return 0.0;
    }
    if (a < b) {
        throw ConfigError("erlang_plus_exp_cdf: requires a >= b");
    }
    const double k = static_cast<double>(shape);
    if (a - b <= 1e-12 * a) {
        return gamma_p(k + 1.0, a * t);
    }
    // F(t) = P(k, at) - e^{-bt} (a/(a-b))^k P(k, (a-b)t), assembled in log
    // space; the subtracted term is a probability, so its log is <= 0 up to
    // rounding.
    const double log_term =
        -b * t + k * (std::log(a) - std::log(a - b)) + log_gamma_p(k, (a - b) * t);
    const double val = gamma_p(k, a * t) - std::exp(std::min(log_term, 0.0));
    return std::clamp(val, 0.0, 1.0);
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureControl& ctl) {
    if (hi <= lo) {
        return 0.0;
    }
    struct Interval {
        double a, b, value, err;
    };
    std::vector<Interval> work;
    const PanelResult whole = gk15(f, lo, hi);
    work.push_back({lo, hi, whole.kronrod, whole.err});

    for (;;) {
        double total_err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < work.size(); ++i) {
            total_err += work[i].err;
            if (work[i].err > work[worst].err) {
                worst = i;
            }
        }
        if (total_err <= ctl.abs_tol) {
            break;
        }
        if (static_cast<int>(work.size()) >= ctl.max_intervals) {
            throw NumericsError("integrate: interval cap reached before tolerance");
        }
        const Interval iv = work[worst];
        const double mid = 0.5 * (iv.a + iv.b);
        if (mid <= iv.a || mid >= iv.b) {
            // Interval narrowed to machine resolution; accept its estimate.
            work[worst].err = 0.0;
            continue;
        }
        const PanelResult left = gk15(f, iv.a, mid);
        const PanelResult right = gk15(f, mid, iv.b);
        work[worst] = {iv.a, mid, left.kronrod, left.err};
        work.push_back({mid, iv.b, right.kronrod, right.err});
    }

    double sum = 0.0;
    for (const auto& iv : work) {
        sum += iv.value;
    }
    return sum;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t stream_index) {
    std::uint64_t state = base_seed;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= stream_index; ++i) {
        out = splitmix64(state);
    }
    return out;
}

}  // namespace bbupool::num
