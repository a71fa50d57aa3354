#include "levyfp/discretization.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace levyfp {

namespace {

std::atomic<std::uint64_t> next_operator_id{1};

void require_interior(double s, const char* fn) {
    if (!(std::abs(s) < 1.0)) {
        std::ostringstream msg;
        msg << fn << ": node s = " << s << " is not in (-1, 1)";
        throw std::domain_error(msg.str());
    }
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x < xs.front() || x > xs.back()) {
        std::ostringstream msg;
        msg << "tabulated drift: x = " << x << " outside table range [" << xs.front() << ", " << xs.back() << "]";
        throw std::domain_error(msg.str());
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) {
        return ys.back();
    }
    const auto hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

// Trapezoidal tail weight  sum_{m=1}^{M} m^{-q}  with the m = M term halved.
// prefix[M] holds the plain partial sum.
double halved_top(const std::vector<double>& prefix, int M, double q) {
    return prefix[static_cast<std::size_t>(M)] - 0.5 * std::pow(static_cast<double>(M), -q);
}

std::vector<double> power_prefix_sums(int max_m, double q) {
    std::vector<double> prefix(static_cast<std::size_t>(max_m) + 1, 0.0);
    for (int m = 1; m <= max_m; ++m) {
        prefix[static_cast<std::size_t>(m)] = prefix[static_cast<std::size_t>(m - 1)] + std::pow(static_cast<double>(m), -q);
    }
    return prefix;
}

void require_lengths(std::span<const double> v, std::span<double> out, std::size_t n) {
    if (v.size() != n || out.size() != n) {
        throw std::invalid_argument("Tridiagonal: vector length does not match matrix size");
    }
}

}  // namespace

Grid::Grid(int J) : J_(J), h_(0.0) {
    if (J < 4) {
        throw std::invalid_argument("Grid: J must be >= 4, got " + std::to_string(J));
    }
    h_ = 1.0 / J;
}

std::vector<double> Grid::interior_nodes() const {
    std::vector<double> s(size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = node(index_to_node(i));
    }
    return s;
}

DriftSpec::DriftSpec(Kind kind) : kind_(std::move(kind)) {}

DriftSpec DriftSpec::tabulated(std::vector<double> x, std::vector<double> f, std::vector<double> fprime) {
    if (x.size() < 2 || f.size() != x.size() || fprime.size() != x.size()) {
        throw std::invalid_argument("tabulated drift: need >= 2 rows with x, f and f' columns of equal length");
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            throw std::invalid_argument("tabulated drift: x must be strictly increasing");
        }
    }
    return DriftSpec{TabulatedDrift{std::move(x), std::move(f), std::move(fprime)}};
}

double DriftSpec::f(double x) const {
    struct Visitor {
        double x;
        double operator()(const ZeroDrift&) const { return 0.0; }
        double operator()(const LinearDrift& d) const { return d.slope * x; }
        double operator()(const TabulatedDrift& d) const { return interpolate(d.x, d.f, x); }
    };
    return std::visit(Visitor{x}, kind_);
}

double DriftSpec::fprime(double x) const {
    struct Visitor {
        double x;
        double operator()(const ZeroDrift&) const { return 0.0; }
        double operator()(const LinearDrift& d) const { return d.slope; }
        double operator()(const TabulatedDrift& d) const { return interpolate(d.x, d.fprime, x); }
    };
    return std::visit(Visitor{x}, kind_);
}

DriftSpec DriftSpec::mirrored() const {
    struct Visitor {
        DriftSpec operator()(const ZeroDrift&) const { return DriftSpec::zero(); }
        DriftSpec operator()(const LinearDrift& d) const { return DriftSpec::linear(d.slope); }
        DriftSpec operator()(const TabulatedDrift& d) const {
            const std::size_t n = d.x.size();
            std::vector<double> x(n), f(n), fp(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t r = n - 1 - i;
                x[i] = -d.x[r];
                f[i] = -d.f[r];
                fp[i] = d.fprime[r];
            }
            return DriftSpec::tabulated(std::move(x), std::move(f), std::move(fp));
        }
    };
    return std::visit(Visitor{}, kind_);
}

std::string DriftSpec::describe() const {
    struct Visitor {
        std::string operator()(const ZeroDrift&) const { return "zero"; }
        std::string operator()(const LinearDrift& d) const {
            std::ostringstream s;
            s.precision(17);
            s << "linear(" << d.slope << ")";
            return s.str();
        }
        std::string operator()(const TabulatedDrift& d) const {
            return "tabulated(" + std::to_string(d.x.size()) + " rows)";
        }
    };
    return std::visit(Visitor{}, kind_);
}

std::string to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::absorbing ? "absorbing" : "natural";
}

double g_function(double s, double alpha) {
    require_interior(s, "g_function");
    const double a = std::abs(s);
    if (is_alpha_one(alpha)) {
        return -std::log1p(-a);
    }
    return -std::expm1((1.0 - alpha) * std::log1p(-a)) / (1.0 - alpha);
}

double drift_shift(const StableParams& p) {
    const auto [c_p, c_n] = skew_constants(p);
    const double k = k_alpha_beta(p);
    const double scale = is_alpha_one(p.alpha) ? std::log(p.b)
                                               : std::expm1((1.0 - p.alpha) * std::log(p.b)) / (1.0 - p.alpha);
    return p.epsilon * k + p.epsilon * (c_p - c_n) * scale;
}

double drift_c(double x, const DriftSpec& drift, const StableParams& p) {
    return drift.f(x) + drift_shift(p);
}

double m1(double s, const DriftSpec& drift, const StableParams& p) {
    require_interior(s, "m1");
    const auto [c_p, c_n] = skew_constants(p);
    const double q = p.epsilon * std::pow(p.b, -p.alpha);
    const double advect = drift_c(p.b * s, drift, p) / p.b;
    const double g = g_function(s, p.alpha);
    return s < 0.0 ? advect - q * c_p * g : advect + q * c_n * g;
}

double exit_rate(double s, const StableParams& p) {
    require_interior(s, "exit_rate");
    const auto [c_p, c_n] = skew_constants(p);
    const double q = p.epsilon * std::pow(p.b, -p.alpha);
    return q / p.alpha * (c_n / std::pow(1.0 - s, p.alpha) + c_p / std::pow(1.0 + s, p.alpha));
}

double m2(double s, const DriftSpec& drift, const StableParams& p, BoundaryCondition bc) {
    require_interior(s, "m2");
    const double reaction = drift.fprime(p.b * s);
    if (bc == BoundaryCondition::natural) {
        return reaction;
    }
    return reaction + exit_rate(s, p);
}

double min_exit_rate(const StableParams& p) {
    const auto [c_p, c_n] = skew_constants(p);
    const double q = p.epsilon * std::pow(p.b, -p.alpha) / p.alpha;
    if (c_p == 0.0 || c_n == 0.0) {
        // One-sided: the infimum is approached at the far end, |s| -> 1.
        return q * (c_p + c_n) / std::pow(2.0, p.alpha);
    }
    // Stationary point of C_n (1-s)^{-alpha} + C_p (1+s)^{-alpha}.
    const double r = std::pow(c_p / c_n, 1.0 / (p.alpha + 1.0));
    const double s = (r - 1.0) / (r + 1.0);
    return q * (c_n / std::pow(1.0 - s, p.alpha) + c_p / std::pow(1.0 + s, p.alpha));
}

double correction_ch(const Grid& grid, const StableParams& p) {
    const double gaussian = p.sigma * p.sigma / (2.0 * p.b * p.b);
    if (p.epsilon == 0.0) {
        return gaussian;
    }
    const double q = p.epsilon * std::pow(p.b, -p.alpha);
    return gaussian - q / 2.0 * c_alpha(p.alpha) * riemann_zeta(p.alpha - 1.0) * std::pow(grid.h(), 2.0 - p.alpha);
}

void Tridiagonal::apply(std::span<const double> v, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    apply_add(v, out, 1.0);
}

void Tridiagonal::apply_add(std::span<const double> v, std::span<double> out, double scale) const {
    const std::size_t n = size();
    require_lengths(v, out, n);
    if (n == 0) {
        return;
    }
    if (n == 1) {
        out[0] += scale * diag[0] * v[0];
        return;
    }
    out[0] += scale * (diag[0] * v[0] + upper[0] * v[1]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] += scale * (lower[i] * v[i - 1] + diag[i] * v[i] + upper[i] * v[i + 1]);
    }
    out[n - 1] += scale * (lower[n - 1] * v[n - 2] + diag[n - 1] * v[n - 1]);
}

Tridiagonal DiscreteOperator::local_part() const {
    Tridiagonal sum = B;
    for (std::size_t i = 0; i < sum.size(); ++i) {
        sum.lower[i] += D.lower[i];
        sum.diag[i] += D.diag[i];
        sum.upper[i] += D.upper[i];
    }
    return sum;
}

AssembledB assemble_b(const Grid& grid, const StableParams& p, const DriftSpec& drift, BoundaryCondition bc) {
    p.validate();
    const std::size_t n = grid.size();
    const double h = grid.h();
    AssembledB out;
    out.c_h = correction_ch(grid, p);
    out.B.lower.assign(n, 0.0);
    out.B.diag.assign(n, 0.0);
    out.B.upper.assign(n, 0.0);
    out.m1_values.resize(n);
    out.m2_values.resize(n);

    const double lap = out.c_h / (h * h);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = grid.node(grid.index_to_node(i));
        const double a1 = m1(s, drift, p);
        const double a2 = m2(s, drift, p, bc);
        out.m1_values[i] = a1;
        out.m2_values[i] = a2;

        double lower = lap;
        double diag = -2.0 * lap;
        double upper = lap;
        if (a1 > 0.0) {
            // backward difference (V_j - V_{j-1})/h
            lower += a1 / h;
            diag += -a1 / h;
        } else {
            // forward difference (V_{j+1} - V_j)/h; also taken at a1 == 0
            upper += -a1 / h;
            diag += a1 / h;
        }
        diag -= a2;
        out.B.lower[i] = lower;
        out.B.diag[i] = diag;
        out.B.upper[i] = upper;
    }
    // neighbours outside (-1, 1) are exterior zeros
    out.B.lower[0] = 0.0;
    out.B.upper[n - 1] = 0.0;
    return out;
}

AssembledS assemble_s(const Grid& grid, const StableParams& p) {
    p.validate();
    const int J = grid.J();
    const std::size_t n = grid.size();
    const double h = grid.h();
    const double alpha = p.alpha;
    const auto [c_p, c_n] = skew_constants(p);
    const double q = p.epsilon * std::pow(p.b, -alpha);
    const double cp_t = q * c_p * h;
    const double cn_t = q * c_n * h;

    AssembledS out;
    out.T.first_col.assign(n, 0.0);
    out.T.first_row.assign(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double dist = std::pow(static_cast<double>(k) * h, 1.0 + alpha);
        out.T.first_col[k] = cp_t / dist;
        out.T.first_row[k] = cn_t / dist;
    }

    const auto prefix_a = power_prefix_sums(2 * J, alpha);
    const auto prefix_a1 = power_prefix_sums(2 * J, alpha + 1.0);
    const double inv_h_a = std::pow(h, -alpha);
    const double inv_h_a1 = std::pow(h, -alpha - 1.0);

    out.D.lower.assign(n, 0.0);
    out.D.diag.assign(n, 0.0);
    out.D.upper.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int j = grid.index_to_node(i);
        // Jumps to the right reach the boundary after J - j cells, to the
        // left after J + j. The regularizing derivative term is truncated at
        // unit jump length.
        const int right_reg = j <= 0 ? J : J - j;
        const int left_reg = j <= 0 ? J + j : J;
        const double lower = cn_t / h * inv_h_a * halved_top(prefix_a, right_reg, alpha);
        const double upper = cp_t / h * inv_h_a * halved_top(prefix_a, left_reg, alpha);
        const double far = cn_t * inv_h_a1 * halved_top(prefix_a1, J - j, alpha + 1.0) +
                           cp_t * inv_h_a1 * halved_top(prefix_a1, J + j, alpha + 1.0);
        out.D.lower[i] = lower;
        out.D.upper[i] = upper;
        out.D.diag[i] = -far - (lower + upper);
    }
    // couplings to V_{-J} and V_J multiply exterior zeros
    out.D.lower[0] = 0.0;
    out.D.upper[n - 1] = 0.0;
    return out;
}

DiscreteOperator assemble(const Grid& grid, const StableParams& p, const DriftSpec& drift, BoundaryCondition bc) {
    p.validate();
    if (!(p.alpha < 2.0)) {
        throw std::invalid_argument(
            "assemble: alpha = 2 is outside the Levy pathway; set epsilon = 0 and use sigma for Gaussian noise");
    }
    DiscreteOperator op;
    op.grid = grid;
    op.params = p;
    op.bc = bc;
    auto b = assemble_b(grid, p, drift, bc);
    auto s = assemble_s(grid, p);
    op.B = std::move(b.B);
    op.c_h = b.c_h;
    op.m1_values = std::move(b.m1_values);
    op.m2_values = std::move(b.m2_values);
    op.T = std::move(s.T);
    op.D = std::move(s.D);
    op.id = next_operator_id.fetch_add(1, std::memory_order_relaxed);
    return op;
}

}  // namespace levyfp
