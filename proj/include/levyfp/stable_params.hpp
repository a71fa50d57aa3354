#pragma once

// Constants of the asymmetric alpha-stable jump measure and the special
// functions the discretization consumes.

namespace levyfp {

/// Parameters of a scalar SDE dX = f(X)dt + sigma dB + dL driven by an
/// alpha-stable motion with stable scale 1 and shift 0, on D = (-b, b).
struct StableParams {
    double alpha = 0.5;    ///< stability index, 0 < alpha <= 2
    double beta = 0.0;     ///< skewness, -1 <= beta <= 1
    double epsilon = 1.0;  ///< intensity of the Levy noise
    double sigma = 0.0;    ///< intensity of the Gaussian noise
    double b = 1.0;        ///< half-width of the physical domain

    /// Throws std::invalid_argument naming the first violated field.
    void validate() const;

    /// Same parameters with the skewness sign flipped.
    [[nodiscard]] StableParams mirrored() const;
};

struct SkewConstants {
    double c_p = 0.0;  ///< weight of positive jumps
    double c_n = 0.0;  ///< weight of negative jumps
};

/// |alpha - 1| at or below this value selects the alpha = 1 branches.
inline constexpr double kAlphaOneTolerance = 1e-12;

[[nodiscard]] inline bool is_alpha_one(double alpha) noexcept {
    return alpha - 1.0 <= kAlphaOneTolerance && 1.0 - alpha <= kAlphaOneTolerance;
}

/// Normalizing constant C_alpha of the jump measure. Requires 0 < alpha < 2.
[[nodiscard]] double c_alpha(double alpha);

/// C_p = C_alpha (1 + beta)/2 and C_n = C_alpha (1 - beta)/2.
[[nodiscard]] SkewConstants skew_constants(const StableParams& p);

/// Compensating drift constant K_{alpha,beta}; antisymmetric in beta.
[[nodiscard]] double k_alpha_beta(const StableParams& p);

/// The alpha = 1 bracket  int_1^inf sin(x)/x^2 dx + int_0^1 (sin(x) - x)/x^2 dx,
/// evaluated once by adaptive quadrature and cached.
[[nodiscard]] double alpha_one_drift_constant();

/// Riemann zeta on [-1, 1) through the alternating eta series with an
/// Euler-transformed tail. Throws std::domain_error outside that interval.
[[nodiscard]] double riemann_zeta(double s);

/// Density of nu_{alpha,beta} at y != 0: (C_p 1{y>0} + C_n 1{y<0}) / |y|^{1+alpha}.
[[nodiscard]] double levy_measure_density(double y, const StableParams& p);

}  // namespace levyfp
