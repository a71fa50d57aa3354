#pragma once

// Independent reference evaluations used by the tests. Everything here is
// written from the formulas directly, in long double, without calling the
// library's coefficient code.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using ld = long double;

inline ld c_alpha(ld a) {
    if (a == 1.0L) return 2.0L / std::numbers::pi_v<ld>;
    return a * (1.0L - a) / (std::tgamma(2.0L - a) * std::cos(std::numbers::pi_v<ld> * a / 2.0L));
}

struct Params {
    ld alpha = 0.5L;
    ld beta = 0.0L;
    ld eps = 1.0L;
    ld sigma = 0.0L;
    ld b = 1.0L;
};

inline ld c_p(const Params& p) { return c_alpha(p.alpha) * (1.0L + p.beta) / 2.0L; }
inline ld c_n(const Params& p) { return c_alpha(p.alpha) * (1.0L - p.beta) / 2.0L; }

// 1 - Euler's gamma: the alpha = 1 bracket in closed form.
inline constexpr ld one_minus_gamma = 0.42278433509846713939348790991759757L;

inline ld k_alpha_beta(const Params& p) {
    if (p.alpha == 1.0L) return one_minus_gamma * (c_n(p) - c_p(p));
    return (c_p(p) - c_n(p)) / (1.0L - p.alpha);
}

inline ld shift(const Params& p) {
    const ld skew = c_p(p) - c_n(p);
    if (p.alpha == 1.0L) return p.eps * k_alpha_beta(p) + p.eps * skew * std::log(p.b);
    return p.eps * k_alpha_beta(p) + p.eps * skew * (std::pow(p.b, 1.0L - p.alpha) - 1.0L) / (1.0L - p.alpha);
}

inline ld g(ld s, ld a) {
    if (a == 1.0L) return -std::log(1.0L - std::fabs(s));
    return (1.0L - std::pow(1.0L - std::fabs(s), 1.0L - a)) / (1.0L - a);
}

// Drift of the form f(x) = slope x.
inline ld m1(ld s, ld slope, const Params& p) {
    const ld c = slope * p.b * s + shift(p);
    const ld q = p.eps * std::pow(p.b, -p.alpha);
    if (s < 0) return c / p.b - q * c_p(p) * g(s, p.alpha);
    return c / p.b + q * c_n(p) * g(s, p.alpha);
}

inline ld m2(ld s, ld slope, const Params& p, bool absorbing) {
    ld v = slope;
    if (absorbing) {
        v += p.eps * std::pow(p.b, -p.alpha) / p.alpha *
             (c_n(p) / std::pow(1.0L - s, p.alpha) + c_p(p) / std::pow(1.0L + s, p.alpha));
    }
    return v;
}

// Dirichlet eta by direct partial sums with repeated averaging, zeta = eta/(1 - 2^{1-s}).
inline ld zeta(ld s) {
    const int N = 60;
    std::vector<ld> partial(N);
    ld acc = 0.0L;
    for (int n = 1; n <= N; ++n) {
        acc += ((n % 2) ? 1.0L : -1.0L) * std::pow(static_cast<ld>(n), -s);
        partial[n - 1] = acc;
    }
    // iterated averaging of consecutive partial sums (Euler transform)
    for (int level = 0; level < N - 1; ++level) {
        for (int i = 0; i + 1 < N - level; ++i) partial[i] = 0.5L * (partial[i] + partial[i + 1]);
    }
    return partial[0] / (1.0L - std::pow(2.0L, 1.0L - s));
}

inline ld c_h(int J, const Params& p) {
    const ld h = 1.0L / J;
    return p.sigma * p.sigma / (2.0L * p.b * p.b) -
           p.eps * std::pow(p.b, -p.alpha) / 2.0L * c_alpha(p.alpha) * zeta(p.alpha - 1.0L) *
               std::pow(h, 2.0L - p.alpha);
}

// Dense B: literal upwind advection, diffusion and reaction rows with
// exterior zeros. Unknown j sits at row j + J - 1.
inline Eigen::MatrixXd literal_b(int J, const Params& p, ld slope, bool absorbing) {
    const int n = 2 * J - 1;
    const ld h = 1.0L / J;
    const ld ch = c_h(J, p);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (int j = -J + 1; j <= J - 1; ++j) {
        const int r = j + J - 1;
        const ld s = j * h;
        const ld a1 = m1(s, slope, p);
        ld lo = ch / (h * h), di = -2.0L * ch / (h * h), up = ch / (h * h);
        if (a1 > 0) {
            lo += a1 / h;
            di -= a1 / h;
        } else {
            up -= a1 / h;
            di += a1 / h;
        }
        di -= m2(s, slope, p, absorbing);
        B(r, r) = static_cast<double>(di);
        if (r > 0) B(r, r - 1) = static_cast<double>(lo);
        if (r < n - 1) B(r, r + 1) = static_cast<double>(up);
    }
    return B;
}

// Direct trapezoidal evaluation of the quadrature operator S on interior
// values V (length 2J - 1); V_{+-J} = 0. A single-term sum whose
// top and bottom coincide covers a zero-length interval and contributes 0.
inline std::vector<ld> direct_s(int J, const Params& p, const std::vector<double>& Vin) {
    const ld h = 1.0L / J;
    const ld a = p.alpha;
    const ld q = p.eps * std::pow(p.b, -a) * h;
    const ld cn = q * c_n(p), cp = q * c_p(p);
    auto V = [&](int k) -> ld { return (k <= -J || k >= J) ? 0.0L : static_cast<ld>(Vin[k + J - 1]); };
    auto s = [&](int k) { return k * h; };
    // weight of index k in sum_{lo}^{hi} with the given halving rule
    enum Half { both, top, bottom };
    auto w = [](int k, int lo, int hi, Half rule) -> ld {
        if (lo == hi) return rule == both ? 0.0L : 0.5L;
        if (k == hi && (rule == both || rule == top)) return 0.5L;
        if (k == lo && (rule == both || rule == bottom)) return 0.5L;
        return 1.0L;
    };
    std::vector<ld> out(Vin.size(), 0.0L);
    for (int j = -J + 1; j <= J - 1; ++j) {
        const ld back = (V(j) - V(j - 1)) / h;
        const ld fwd = (V(j + 1) - V(j)) / h;
        ld acc = 0.0L;
        auto right_reg = [&](int lo, int hi, Half rule) {
            for (int k = lo; k <= hi; ++k) {
                const ld d = s(k) - s(j);
                acc += cn * w(k, lo, hi, rule) * (V(k) - V(j) - d * back) / std::pow(d, a + 1.0L);
            }
        };
        auto left_reg = [&](int lo, int hi, Half rule) {
            for (int k = lo; k <= hi; ++k) {
                const ld d = s(k) - s(j);
                acc += cp * w(k, lo, hi, rule) * (V(k) - V(j) - d * fwd) / std::pow(-d, a + 1.0L);
            }
        };
        auto right_far = [&](int lo, int hi) {
            for (int k = lo; k <= hi; ++k)
                acc += cn * w(k, lo, hi, both) * (V(k) - V(j)) / std::pow(s(k) - s(j), 1.0L + a);
        };
        auto left_far = [&](int lo, int hi) {
            for (int k = lo; k <= hi; ++k)
                acc += cp * w(k, lo, hi, both) * (V(k) - V(j)) / std::pow(s(j) - s(k), 1.0L + a);
        };
        if (j <= -1) {
            right_reg(j + 1, J + j, top);
            right_far(J + j, J);
            left_reg(-J, j - 1, bottom);
        } else {
            right_reg(j + 1, J, top);
            left_far(-J, -J + j);
            left_reg(-J + j, j - 1, bottom);
        }
        out[static_cast<std::size_t>(j + J - 1)] = acc;
    }
    return out;
}

// Levy density t x^{-3/2} exp(-t^2/(2x)) / sqrt(2 pi).
inline ld levy_density(ld x, ld t) {
    if (x <= 0) return 0.0L;
    return t * std::pow(x, -1.5L) * std::exp(-t * t / (2.0L * x)) / std::sqrt(2.0L * std::numbers::pi_v<ld>);
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

inline double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace oracle
