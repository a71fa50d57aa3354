#include "levyfp/stable_params.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyfp {

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) {
        std::ostringstream msg;
        msg << "StableParams." << field << ": " << what;
        throw std::invalid_argument(msg.str());
    }
}

// Sum of the alternating series  t_0 - t_1 + t_2 - ...  given its first
// terms, by the Euler transformation  sum_n 2^{-(n+1)} (Delta^n t)_0 .
// The forward differences are built in place; with N terms the transform
// is truncated after N differences.
double euler_alternating_sum(std::vector<double> t) {
    double sum = 0.0;
    double weight = 0.5;
    const std::size_t n_terms = t.size();
    for (std::size_t n = 0; n < n_terms; ++n) {
        sum += weight * t[0];
        weight *= 0.5;
        for (std::size_t k = 0; k + 1 < n_terms - n; ++k) {
            t[k] -= t[k + 1];
        }
    }
    return sum;
}

constexpr std::size_t kEulerTerms = 72;

double compute_alpha_one_constant() {
    using boost::math::quadrature::gauss_kronrod;
    constexpr double tol = 1e-14;
    constexpr unsigned depth = 30;
    const double pi = std::numbers::pi;

    // Head near the origin: (sin x - x)/x^2 ~ -x/6 is smooth on [0, 1].
    auto head = [](double x) {
        if (x < 1e-4) {
            const double x2 = x * x;
            return -x / 6.0 + x * x2 / 120.0 - x * x2 * x2 / 5040.0;
        }
        return (std::sin(x) - x) / (x * x);
    };
    auto tail = [](double x) { return std::sin(x) / (x * x); };

    double result = gauss_kronrod<double, 15>::integrate(head, 0.0, 1.0, depth, tol);
    result += gauss_kronrod<double, 15>::integrate(tail, 1.0, pi, depth, tol);

    // Half periods [k pi, (k+1) pi] give an alternating series with smooth,
    // decreasing magnitudes; the leading ones are summed directly.
    constexpr int direct = 16;
    for (int k = 1; k <= direct; ++k) {
        result += gauss_kronrod<double, 15>::integrate(tail, k * pi, (k + 1) * pi, depth, tol);
    }
    std::vector<double> magnitudes;
    magnitudes.reserve(kEulerTerms);
    for (std::size_t i = 0; i < kEulerTerms; ++i) {
        const double k = static_cast<double>(direct + 1 + static_cast<int>(i));
        magnitudes.push_back(std::abs(
            gauss_kronrod<double, 15>::integrate(tail, k * pi, (k + 1) * pi, depth, tol)));
    }
    // sin is negative on [k pi, (k+1) pi] for odd k; direct + 1 is odd.
    result -= euler_alternating_sum(std::move(magnitudes));
    return result;
}

}  // namespace

void StableParams::validate() const {
    require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 2.0, "alpha", "must lie in (0, 2]");
    require(std::isfinite(beta) && beta >= -1.0 && beta <= 1.0, "beta", "must lie in [-1, 1]");
    require(std::isfinite(epsilon) && epsilon >= 0.0, "epsilon", "must be >= 0");
    require(std::isfinite(sigma) && sigma >= 0.0, "sigma", "must be >= 0");
    require(std::isfinite(b) && b > 0.0, "b", "must be > 0");
}

StableParams StableParams::mirrored() const {
    StableParams m = *this;
    m.beta = -beta;
    return m;
}

double c_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::domain_error("c_alpha: alpha must lie in (0, 2), got " + std::to_string(alpha));
    }
    if (is_alpha_one(alpha)) {
        return 2.0 / std::numbers::pi;
    }
    return alpha * (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

SkewConstants skew_constants(const StableParams& p) {
    const double c = c_alpha(p.alpha);
    return {c * (1.0 + p.beta) / 2.0, c * (1.0 - p.beta) / 2.0};
}

double k_alpha_beta(const StableParams& p) {
    const auto [c_p, c_n] = skew_constants(p);
    if (is_alpha_one(p.alpha)) {
        return alpha_one_drift_constant() * (c_n - c_p);
    }
    return (c_p - c_n) / (1.0 - p.alpha);
}

double alpha_one_drift_constant() {
    static const double value = compute_alpha_one_constant();
    return value;
}

double riemann_zeta(double s) {
    if (!(s >= -1.0 && s < 1.0)) {
        throw std::domain_error("riemann_zeta: argument must lie in [-1, 1), got " + std::to_string(s));
    }
    std::vector<double> terms(kEulerTerms);
    for (std::size_t k = 0; k < kEulerTerms; ++k) {
        terms[k] = std::pow(static_cast<double>(k + 1), -s);
    }
    const double eta = euler_alternating_sum(std::move(terms));
    return eta / (1.0 - std::exp2(1.0 - s));
}

double levy_measure_density(double y, const StableParams& p) {
    if (y == 0.0 || !std::isfinite(y)) {
        throw std::domain_error("levy_measure_density: the jump measure is singular at y = 0");
    }
    const auto [c_p, c_n] = skew_constants(p);
    const double weight = y > 0.0 ? c_p : c_n;
    return weight / std::pow(std::abs(y), 1.0 + p.alpha);
}

}  // namespace levyfp
