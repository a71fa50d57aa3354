#include "levyfp/time_integration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace levyfp {

std::string to_string(Scheme scheme) {
    return scheme == Scheme::forward_euler ? "forward_euler" : "backward_euler";
}

std::string to_string(LinearSolverKind kind) {
    return kind == LinearSolverKind::dense_lu ? "dense_lu" : "matrix_free";
}

namespace {

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double two_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

bool multiple_of(double t, double dt, long* k_out) {
    const double ratio = t / dt;
    const long k = std::lround(ratio);
    if (k_out != nullptr) *k_out = k;
    return std::abs(static_cast<double>(k) * dt - t) <= 1e-12 * std::max(1.0, std::abs(t));
}

// Thomas factorization of a diagonally dominant tridiagonal matrix.
class TridiagonalSolver {
public:
    TridiagonalSolver() = default;
    explicit TridiagonalSolver(const Tridiagonal& m) : lower_(m.lower), upper_(m.size()), inv_pivot_(m.size()) {
        const std::size_t n = m.size();
        double prev_upper = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pivot = m.diag[i] - (i > 0 ? lower_[i] * prev_upper : 0.0);
            if (pivot == 0.0 || !std::isfinite(pivot)) {
                throw StepError("tridiagonal preconditioner has a zero pivot", std::numeric_limits<double>::infinity());
            }
            inv_pivot_[i] = 1.0 / pivot;
            upper_[i] = m.upper[i] * inv_pivot_[i];
            prev_upper = upper_[i];
        }
    }

    void solve(std::span<const double> rhs, std::span<double> x) const {
        const std::size_t n = upper_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double prev = i > 0 ? lower_[i] * x[i - 1] : 0.0;
            x[i] = (rhs[i] - prev) * inv_pivot_[i];
        }
        for (std::size_t i = n - 1; i-- > 0;) {
            x[i] -= upper_[i] * x[i + 1];
        }
    }

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> inv_pivot_;
};

}  // namespace

void StepperConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("StepperConfig.dt must be > 0");
    }
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        throw std::invalid_argument("StepperConfig.t_final must be >= 0");
    }
    if (!multiple_of(t_final, dt, nullptr)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "StepperConfig: t_final = " << t_final << " is not a multiple of dt = " << dt;
        throw std::invalid_argument(msg.str());
    }
    for (double t : snapshot_times) {
        if (!(t >= 0.0) || t > t_final * (1.0 + 1e-12)) {
            throw std::invalid_argument("StepperConfig: snapshot time " + std::to_string(t) + " outside [0, t_final]");
        }
        if (!multiple_of(t, dt, nullptr)) {
            throw std::invalid_argument("StepperConfig: snapshot time " + std::to_string(t) +
                                        " is not a multiple of dt");
        }
    }
    const auto& it = solver.iterative;
    if (solver.kind == LinearSolverKind::matrix_free) {
        if (!(it.tol > 0.0 && it.tol <= 1e-4)) {
            throw std::invalid_argument("IterativeSolverConfig.tol must lie in (0, 1e-4]");
        }
        if (it.max_iter < 1 || it.restart < 1) {
            throw std::invalid_argument("IterativeSolverConfig: max_iter and restart must be >= 1");
        }
    }
}

long StepperConfig::steps() const {
    long k = 0;
    multiple_of(t_final, dt, &k);
    return k;
}

double discrete_mass(const DiscreteOperator& op, std::span<const double> v) {
    const double sum = std::accumulate(v.begin(), v.end(), 0.0);
    return op.params.b * op.grid.h() * sum;
}

Frame make_frame(const DiscreteOperator& op, double t, std::vector<double> v) {
    Frame f;
    f.t = t;
    f.mass = discrete_mass(op, v);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    f.min = *lo;
    f.max = *hi;
    // ties resolve to the node closest to the origin
    const Grid& g = op.grid;
    std::size_t best = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > v[best] || (v[i] == v[best] && std::abs(g.index_to_node(i)) < std::abs(g.index_to_node(best)))) {
            best = i;
        }
    }
    f.argmax_index = best;
    f.V = std::move(v);
    return f;
}

double Trajectory::global_min() const {
    double m = frames.empty() ? 0.0 : frames.front().min;
    for (const auto& s : steps) m = std::min(m, s.min);
    for (const auto& f : frames) m = std::min(m, f.min);
    return m;
}

double Trajectory::global_max() const {
    double m = frames.empty() ? 0.0 : frames.front().max;
    for (const auto& s : steps) m = std::max(m, s.max);
    for (const auto& f : frames) m = std::max(m, f.max);
    return m;
}

std::vector<double> forward_euler_step(const DiscreteOperator& op, std::span<const double> v, double dt,
                                       FastWorkspace& ws, ApplyMode mode) {
    std::vector<double> out = apply_a(op, v, ws, mode);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = v[i] + dt * out[i];
    }
    return out;
}

struct BackwardEulerSolver::Impl {
    const DiscreteOperator* op;
    double dt;
    LinearSolverConfig cfg;
    ApplyMode mode;
    FastWorkspace ws;
    int last_iterations = 0;
    double last_residual = 0.0;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    TridiagonalSolver precond;
    bool use_precond = false;

    // Krylov scratch
    std::vector<std::vector<double>> basis;
    std::vector<double> hess;  // (restart + 1) x restart, column-major
    std::vector<double> cs, sn, g, y, z, w, r;

    Impl(const DiscreteOperator& o, double step, LinearSolverConfig c, ApplyMode m)
        : op(&o), dt(step), cfg(c), mode(m), ws(o) {
        const auto n = static_cast<Eigen::Index>(o.size());
        if (cfg.kind == LinearSolverKind::dense_lu) {
            Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - dt * reference::to_dense(o);
            lu.compute(system);
            return;
        }
        if (cfg.iterative.precondition && dt > 0.0) {
            Tridiagonal p = o.local_part();
            for (std::size_t i = 0; i < p.size(); ++i) {
                p.lower[i] *= -dt;
                p.upper[i] *= -dt;
                p.diag[i] = 1.0 - dt * p.diag[i];
            }
            precond = TridiagonalSolver(p);
            use_precond = true;
        }
        const auto restart = static_cast<std::size_t>(cfg.iterative.restart);
        basis.assign(restart + 1, std::vector<double>(o.size()));
        hess.assign((restart + 1) * restart, 0.0);
        cs.assign(restart, 0.0);
        sn.assign(restart, 0.0);
        g.assign(restart + 1, 0.0);
        y.assign(restart, 0.0);
        z.assign(o.size(), 0.0);
        w.assign(o.size(), 0.0);
        r.assign(o.size(), 0.0);
    }

    // out = (I - dt A) x
    void system_apply(std::span<const double> x, std::span<double> out) {
        apply_a(*op, x, out, ws, mode);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = x[i] - dt * out[i];
        }
    }

    void precondition(std::span<const double> x, std::span<double> out) const {
        if (use_precond) {
            precond.solve(x, out);
        } else {
            std::copy(x.begin(), x.end(), out.begin());
        }
    }

    double residual_inf(std::span<const double> x, std::span<const double> rhs) {
        system_apply(x, r);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
        return sup_norm(r);
    }

    std::vector<double> solve_dense(std::span<const double> v) {
        const auto n = static_cast<Eigen::Index>(v.size());
        Eigen::Map<const Eigen::VectorXd> rhs(v.data(), n);
        Eigen::VectorXd x = lu.solve(rhs);
        std::vector<double> out(x.data(), x.data() + n);
        last_iterations = 0;
        r.resize(v.size());
        last_residual = residual_inf(out, v);
        return out;
    }

    std::vector<double> solve_gmres(std::span<const double> v) {
        const std::size_t n = v.size();
        const auto restart = static_cast<std::size_t>(cfg.iterative.restart);
        const double target = cfg.iterative.tol * two_norm(v);
        std::vector<double> x(v.begin(), v.end());
        last_iterations = 0;
        if (target == 0.0) {
            std::fill(x.begin(), x.end(), 0.0);
            last_residual = 0.0;
            return x;
        }
        auto H = [&](std::size_t i, std::size_t k) -> double& { return hess[k * (restart + 1) + i]; };

        while (true) {
            system_apply(x, r);
            for (std::size_t i = 0; i < n; ++i) r[i] = v[i] - r[i];
            const double beta = two_norm(r);
            if (beta <= target) {
                last_residual = sup_norm(r);
                return x;
            }
            if (last_iterations >= cfg.iterative.max_iter) {
                throw StepError("GMRES did not converge within " + std::to_string(cfg.iterative.max_iter) +
                                    " iterations (residual " + std::to_string(sup_norm(r)) + ")",
                                sup_norm(r));
            }
            for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
            std::fill(g.begin(), g.end(), 0.0);
            g[0] = beta;

            std::size_t used = 0;
            for (std::size_t k = 0; k < restart && last_iterations < cfg.iterative.max_iter; ++k) {
                precondition(basis[k], z);
                system_apply(z, w);
                // modified Gram-Schmidt, two passes
                for (std::size_t i = 0; i <= k; ++i) H(i, k) = 0.0;
                for (int pass = 0; pass < 2; ++pass) {
                    for (std::size_t i = 0; i <= k; ++i) {
                        const double hik = dot(w, basis[i]);
                        H(i, k) += hik;
                        for (std::size_t l = 0; l < n; ++l) w[l] -= hik * basis[i][l];
                    }
                }
                const double norm_w = two_norm(w);
                H(k + 1, k) = norm_w;
                if (norm_w > 0.0) {
                    for (std::size_t l = 0; l < n; ++l) basis[k + 1][l] = w[l] / norm_w;
                }
                for (std::size_t i = 0; i < k; ++i) {
                    const double a = H(i, k);
                    const double b = H(i + 1, k);
                    H(i, k) = cs[i] * a + sn[i] * b;
                    H(i + 1, k) = -sn[i] * a + cs[i] * b;
                }
                const double a = H(k, k);
                const double b = H(k + 1, k);
                const double rho = std::hypot(a, b);
                cs[k] = rho == 0.0 ? 1.0 : a / rho;
                sn[k] = rho == 0.0 ? 0.0 : b / rho;
                H(k, k) = rho;
                H(k + 1, k) = 0.0;
                g[k + 1] = -sn[k] * g[k];
                g[k] = cs[k] * g[k];
                ++last_iterations;
                used = k + 1;
                if (std::abs(g[k + 1]) <= target || norm_w == 0.0) {
                    break;
                }
            }
            for (std::size_t i = used; i-- > 0;) {
                double acc = g[i];
                for (std::size_t l = i + 1; l < used; ++l) acc -= H(i, l) * y[l];
                y[i] = acc / H(i, i);
            }
            std::fill(w.begin(), w.end(), 0.0);
            for (std::size_t i = 0; i < used; ++i) {
                for (std::size_t l = 0; l < n; ++l) w[l] += y[i] * basis[i][l];
            }
            precondition(w, z);
            for (std::size_t l = 0; l < n; ++l) x[l] += z[l];
        }
    }
};

BackwardEulerSolver::BackwardEulerSolver(const DiscreteOperator& op, double dt, LinearSolverConfig cfg,
                                         ApplyMode mode)
    : impl_(std::make_unique<Impl>(op, dt, cfg, mode)) {}

BackwardEulerSolver::~BackwardEulerSolver() = default;
BackwardEulerSolver::BackwardEulerSolver(BackwardEulerSolver&&) noexcept = default;
BackwardEulerSolver& BackwardEulerSolver::operator=(BackwardEulerSolver&&) noexcept = default;

std::vector<double> BackwardEulerSolver::solve(std::span<const double> v) {
    if (v.size() != impl_->op->size()) {
        throw std::invalid_argument("BackwardEulerSolver: vector length does not match operator size");
    }
    if (impl_->dt == 0.0) {
        impl_->last_iterations = 0;
        impl_->last_residual = 0.0;
        return {v.begin(), v.end()};
    }
    return impl_->cfg.kind == LinearSolverKind::dense_lu ? impl_->solve_dense(v) : impl_->solve_gmres(v);
}

int BackwardEulerSolver::last_iterations() const noexcept { return impl_->last_iterations; }
double BackwardEulerSolver::last_residual() const noexcept { return impl_->last_residual; }

std::vector<double> backward_euler_step(const DiscreteOperator& op, std::span<const double> v, double dt,
                                        FastWorkspace& ws, const LinearSolverConfig& solver, ApplyMode mode) {
    ws.bind(op);
    BackwardEulerSolver s(op, dt, solver, mode);
    return s.solve(v);
}

Trajectory run(const DiscreteOperator& op, std::span<const double> ic, const StepperConfig& cfg, FastWorkspace& ws) {
    cfg.validate();
    if (ic.size() != op.size()) {
        throw std::invalid_argument("run: initial condition length does not match operator size");
    }
    for (double x : ic) {
        if (!std::isfinite(x)) throw std::invalid_argument("run: initial condition is not finite");
    }
    ws.bind(op);

    const long n_steps = cfg.steps();
    std::vector<long> output_steps;
    output_steps.push_back(0);
    for (double t : cfg.snapshot_times) {
        long k = 0;
        multiple_of(t, cfg.dt, &k);
        output_steps.push_back(k);
    }
    output_steps.push_back(n_steps);
    std::sort(output_steps.begin(), output_steps.end());
    output_steps.erase(std::unique(output_steps.begin(), output_steps.end()), output_steps.end());

    Trajectory traj;
    traj.scheme = cfg.scheme;
    traj.positivity_preserving = cfg.scheme == Scheme::backward_euler;
    traj.steps.reserve(static_cast<std::size_t>(n_steps));

    std::vector<double> v(ic.begin(), ic.end());
    traj.frames.push_back(make_frame(op, 0.0, v));

    std::unique_ptr<BackwardEulerSolver> implicit;
    if (cfg.scheme == Scheme::backward_euler && n_steps > 0) {
        implicit = std::make_unique<BackwardEulerSolver>(op, cfg.dt, cfg.solver, cfg.mode);
    }

    std::size_t next_output = 1;
    for (long k = 1; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const auto start = std::chrono::steady_clock::now();
        int iterations = 0;
        try {
            if (implicit) {
                v = implicit->solve(v);
                iterations = implicit->last_iterations();
            } else {
                v = forward_euler_step(op, v, cfg.dt, ws, cfg.mode);
            }
        } catch (const StepError& e) {
            std::ostringstream msg;
            msg << "step " << k << " to t = " << t << " failed: " << e.what();
            throw StepError(msg.str(), e.residual(), t);
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

        StepRecord rec;
        rec.t = t;
        rec.mass = discrete_mass(op, v);
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        rec.min = *lo;
        rec.max = *hi;
        rec.seconds = elapsed.count();
        rec.iterations = iterations;
        traj.steps.push_back(rec);

        if (next_output < output_steps.size() && output_steps[next_output] == k) {
            traj.frames.push_back(make_frame(op, t, v));
            ++next_output;
        }
    }
    return traj;
}

MaxPrincipleCheck check_max_principle_condition(const DiscreteOperator& op) {
    MaxPrincipleCheck check;
    check.margin = *std::min_element(op.m2_values.begin(), op.m2_values.end());
    check.satisfied = check.margin >= 0.0;
    return check;
}

}  // namespace levyfp
