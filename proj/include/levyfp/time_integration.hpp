#pragma once

#include "levyfp/discretization.hpp"
#include "levyfp/operator_apply.hpp"

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace levyfp {

enum class Scheme { forward_euler, backward_euler };
enum class LinearSolverKind { dense_lu, matrix_free };

[[nodiscard]] std::string to_string(Scheme scheme);
[[nodiscard]] std::string to_string(LinearSolverKind kind);

/// Restarted GMRES on (I - dt A) W = V, applied matrix-free.
struct IterativeSolverConfig {
    double tol = 1e-10;       ///< on ||residual||_2 / ||V||_2, in (0, 1e-4]
    int max_iter = 500;       ///< total Krylov iterations over all restarts
    int restart = 60;
    bool precondition = true; ///< right-precondition with I - dt (B + D_S)
};

struct LinearSolverConfig {
    LinearSolverKind kind = LinearSolverKind::matrix_free;
    IterativeSolverConfig iterative;
};

struct StepperConfig {
    Scheme scheme = Scheme::backward_euler;
    double dt = 0.0;
    double t_final = 0.0;
    LinearSolverConfig solver;
    ApplyMode mode = ApplyMode::fast;
    /// Extra output times; each must be a multiple of dt not beyond t_final.
    std::vector<double> snapshot_times;

    /// Throws std::invalid_argument on the first violated invariant.
    void validate() const;
    /// Number of steps to reach t_final.
    [[nodiscard]] long steps() const;
};

/// Raised when a step cannot be completed.
class StepError : public std::runtime_error {
public:
    StepError(const std::string& what, double residual, double time = -1.0)
        : std::runtime_error(what), residual_(residual), time_(time) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }
    /// Time the failing step was advancing to, or -1 if unknown.
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double residual_;
    double time_;
};

/// Trapezoidal mass  b h sum_j V_j  (exterior values are zero).
[[nodiscard]] double discrete_mass(const DiscreteOperator& op, std::span<const double> v);

struct Frame {
    double t = 0.0;
    std::vector<double> V;
    double mass = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t argmax_index = 0;
};

[[nodiscard]] Frame make_frame(const DiscreteOperator& op, double t, std::vector<double> v);

/// Per-step diagnostics, recorded for every step (not only snapshots).
struct StepRecord {
    double t = 0.0;
    double mass = 0.0;
    double min = 0.0;
    double max = 0.0;
    double seconds = 0.0;
    int iterations = 0;
};

struct Trajectory {
    std::vector<Frame> frames;     ///< strictly increasing times, frames[0] is the initial condition
    std::vector<StepRecord> steps;
    Scheme scheme = Scheme::backward_euler;
    bool positivity_preserving = true;  ///< false for forward Euler

    [[nodiscard]] const Frame& final_frame() const { return frames.back(); }
    /// Minimum over the initial condition and every step.
    [[nodiscard]] double global_min() const;
    /// Maximum over the initial condition and every step.
    [[nodiscard]] double global_max() const;
};

/// V + dt A V.
[[nodiscard]] std::vector<double> forward_euler_step(const DiscreteOperator& op, std::span<const double> v, double dt,
                                                     FastWorkspace& ws, ApplyMode mode = ApplyMode::fast);

/// Solves (I - dt A) W = V for a fixed operator and step. The dense path
/// factors I - dt A once; the matrix-free path keeps its Krylov workspace.
class BackwardEulerSolver {
public:
    BackwardEulerSolver(const DiscreteOperator& op, double dt, LinearSolverConfig cfg,
                        ApplyMode mode = ApplyMode::fast);
    ~BackwardEulerSolver();
    BackwardEulerSolver(BackwardEulerSolver&&) noexcept;
    BackwardEulerSolver& operator=(BackwardEulerSolver&&) noexcept;

    /// Throws StepError if GMRES stalls before max_iter.
    [[nodiscard]] std::vector<double> solve(std::span<const double> v);

    [[nodiscard]] int last_iterations() const noexcept;
    /// ||(I - dt A) W - V||_inf of the last solve.
    [[nodiscard]] double last_residual() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One implicit step; builds a throwaway solver. Prefer BackwardEulerSolver
/// when stepping repeatedly.
[[nodiscard]] std::vector<double> backward_euler_step(const DiscreteOperator& op, std::span<const double> v, double dt,
                                                      FastWorkspace& ws, const LinearSolverConfig& solver,
                                                      ApplyMode mode = ApplyMode::fast);

/// Integrates from t = 0 to cfg.t_final, keeping the initial condition, the
/// requested snapshots and the final state. StepError carries the failing time.
[[nodiscard]] Trajectory run(const DiscreteOperator& op, std::span<const double> ic, const StepperConfig& cfg,
                             FastWorkspace& ws);

struct MaxPrincipleCheck {
    bool satisfied = false;
    double margin = 0.0;  ///< min over interior nodes of m2(s_j)
};

[[nodiscard]] MaxPrincipleCheck check_max_principle_condition(const DiscreteOperator& op);

}  // namespace levyfp
