#pragma once

#include "levyfp/stable_params.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace levyfp {

/// Uniform partition s_j = j h of [-1, 1] with h = 1/J.
///
/// Unknowns live on the interior nodes j = -J+1 .. J-1 and are stored at
/// vector index j + J - 1. Exterior values (|j| >= J) are identically zero.
class Grid {
public:
    explicit Grid(int J);

    [[nodiscard]] int J() const noexcept { return J_; }
    [[nodiscard]] double h() const noexcept { return h_; }
    /// Number of unknowns, 2J - 1.
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(2 * J_ - 1); }

    [[nodiscard]] double node(int j) const noexcept { return j * h_; }
    [[nodiscard]] int index_to_node(std::size_t i) const noexcept { return static_cast<int>(i) - J_ + 1; }
    [[nodiscard]] std::size_t node_to_index(int j) const noexcept { return static_cast<std::size_t>(j + J_ - 1); }

    /// Interior node coordinates s_j.
    [[nodiscard]] std::vector<double> interior_nodes() const;

private:
    int J_;
    double h_;
};

struct ZeroDrift {};

struct LinearDrift {
    double slope = 0.0;  ///< f(x) = slope * x
};

/// Drift given by samples of f and f' on increasing physical abscissae;
/// evaluated by piecewise-linear interpolation.
struct TabulatedDrift {
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> fprime;
};

/// The deterministic drift f of the SDE.
class DriftSpec {
public:
    using Kind = std::variant<ZeroDrift, LinearDrift, TabulatedDrift>;

    DriftSpec() = default;
    DriftSpec(Kind kind);  // NOLINT(google-explicit-constructor)

    static DriftSpec zero() { return DriftSpec{ZeroDrift{}}; }
    static DriftSpec linear(double slope) { return DriftSpec{LinearDrift{slope}}; }
    /// Throws std::invalid_argument on ragged, unsorted or too-short tables.
    static DriftSpec tabulated(std::vector<double> x, std::vector<double> f, std::vector<double> fprime);

    [[nodiscard]] double f(double x) const;
    [[nodiscard]] double fprime(double x) const;

    /// The drift -f(-x), which pairs with -beta in the mirror symmetry.
    [[nodiscard]] DriftSpec mirrored() const;

    [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
    [[nodiscard]] std::string describe() const;

private:
    Kind kind_ = ZeroDrift{};
};

enum class BoundaryCondition { absorbing, natural };

[[nodiscard]] std::string to_string(BoundaryCondition bc);

/// g(s) of the rescaled equation. Requires |s| < 1.
[[nodiscard]] double g_function(double s, double alpha);

/// Constant part of c(x) - f(x): eps K + eps (C_p - C_n)(b^{1-alpha} - 1)/(1 - alpha)
/// (eps (C_p - C_n) ln b at alpha = 1).
[[nodiscard]] double drift_shift(const StableParams& p);

/// Effective drift c(x) = f(x) + drift_shift(p).
[[nodiscard]] double drift_c(double x, const DriftSpec& drift, const StableParams& p);

/// Advection coefficient m1(s) of the rescaled equation. Requires |s| < 1.
[[nodiscard]] double m1(double s, const DriftSpec& drift, const StableParams& p);

/// (eps b^{-alpha}/alpha) [C_n/(1-s)^alpha + C_p/(1+s)^alpha], the rate at which
/// mass jumps out of (-1, 1) from s. Requires |s| < 1.
[[nodiscard]] double exit_rate(double s, const StableParams& p);

/// Reaction coefficient m2(s): c'(bs) + exit_rate(s) for the absorbing
/// condition, c'(bs) for the natural condition. Requires |s| < 1.
[[nodiscard]] double m2(double s, const DriftSpec& drift, const StableParams& p,
                        BoundaryCondition bc = BoundaryCondition::absorbing);

/// inf over s in (-1, 1) of exit_rate(s). The maximum principle for the
/// absorbing condition holds when f' is at least minus this value.
[[nodiscard]] double min_exit_rate(const StableParams& p);

/// Corrected diffusion coefficient
/// C_h = sigma^2/(2 b^2) - (eps b^{-alpha}/2) C_alpha zeta(alpha - 1) h^{2 - alpha}.
[[nodiscard]] double correction_ch(const Grid& grid, const StableParams& p);

/// Tridiagonal matrix stored by diagonals; lower[0] and upper[n-1] are zero.
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }
    /// out = M v (out is overwritten).
    void apply(std::span<const double> v, std::span<double> out) const;
    /// out += scale * M v.
    void apply_add(std::span<const double> v, std::span<double> out, double scale = 1.0) const;
};

/// Toeplitz matrix stored as its first column and first row
/// (first_col[0] == first_row[0] is the diagonal).
struct Toeplitz {
    std::vector<double> first_col;
    std::vector<double> first_row;

    [[nodiscard]] std::size_t size() const noexcept { return first_col.size(); }
};

/// The semi-discrete operator A = B + T_S + D_S on the interior unknowns.
struct DiscreteOperator {
    Grid grid{4};
    StableParams params;
    BoundaryCondition bc = BoundaryCondition::absorbing;

    Tridiagonal B;       ///< diffusion, upwind advection and reaction
    Toeplitz T;          ///< far-field part of the quadrature operator S
    Tridiagonal D;       ///< local part of S: lower b_k, diag a_k, upper p_k
    double c_h = 0.0;
    std::vector<double> m1_values;
    std::vector<double> m2_values;

    /// Distinct for every assembled operator; workspaces key their cached
    /// spectrum on it.
    std::uint64_t id = 0;

    [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }
    /// B + D_S, the tridiagonal part of A.
    [[nodiscard]] Tridiagonal local_part() const;
};

/// B of the semi-discrete scheme, together with the m1/m2 node values.
struct AssembledB {
    Tridiagonal B;
    double c_h = 0.0;
    std::vector<double> m1_values;
    std::vector<double> m2_values;
};

struct AssembledS {
    Toeplitz T;
    Tridiagonal D;
};

[[nodiscard]] AssembledB assemble_b(const Grid& grid, const StableParams& p, const DriftSpec& drift,
                                    BoundaryCondition bc);

[[nodiscard]] AssembledS assemble_s(const Grid& grid, const StableParams& p);

/// Full operator. Requires 0 < alpha < 2 and valid parameters.
[[nodiscard]] DiscreteOperator assemble(const Grid& grid, const StableParams& p, const DriftSpec& drift,
                                        BoundaryCondition bc);

}  // namespace levyfp
