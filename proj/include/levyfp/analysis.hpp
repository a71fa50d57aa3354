#pragma once

#include "levyfp/discretization.hpp"
#include "levyfp/time_integration.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace levyfp {

/// Density in physical coordinates at time t.
struct Snapshot {
    double t = 0.0;
    std::vector<double> x_nodes;   ///< b s_j on interior nodes, strictly increasing
    std::vector<double> p_values;  ///< p(b s_j, t) = V_j
    double b = 1.0;                ///< half-width of the represented domain
};

[[nodiscard]] Snapshot to_snapshot(const DiscreteOperator& op, const Frame& frame);

/// Density of the alpha = 1/2, beta = 1 stable motion (Levy distribution)
/// at time t > 0:  t x^{-3/2} exp(-t^2/(2x)) / sqrt(2 pi) for x > 0, else 0.
[[nodiscard]] double exact_levy_density(double x, double t);

struct ErrorNorms {
    double sup_error = 0.0;
    double l1_error = 0.0;  ///< trapezoid over the compared nodes
};

/// Errors of a snapshot against an exact density sampled at its nodes.
/// Only nodes with x_min < x <= x_max are compared when a window is given.
[[nodiscard]] ErrorNorms error_norms(const Snapshot& num, const std::function<double(double)>& exact,
                                     std::optional<std::pair<double, double>> window = std::nullopt);

/// Errors between two snapshots on the nodes of `num`; `ref` must contain
/// every node of `num` (e.g. a refinement by an integer factor).
[[nodiscard]] ErrorNorms error_norms(const Snapshot& num, const Snapshot& ref,
                                     std::optional<std::pair<double, double>> window = std::nullopt);

/// Trapezoidal integral over [-b, b] with zero values at the endpoints.
[[nodiscard]] double total_mass(const Snapshot& s);

/// max over frames of max_j |V_j(beta) - V_{-j}(-beta)|. The trajectories
/// must share grid size and output times (std::invalid_argument otherwise).
[[nodiscard]] double mirror_check(const Trajectory& plus, const Trajectory& minus);

struct MpppPoint {
    double t = 0.0;
    bool defined = false;  ///< false for an identically zero snapshot
    double x_node = 0.0;   ///< argmax node, ties toward the origin
    double x_refined = 0.0;  ///< vertex of the parabola through the peak and its neighbours
};

/// Most probable phase portrait: location of the density maximum over time.
[[nodiscard]] std::vector<MpppPoint> mppp(const DiscreteOperator& op, const Trajectory& traj);

/// Same, for snapshots on an arbitrary uniform grid.
[[nodiscard]] std::vector<MpppPoint> mppp(const std::vector<Snapshot>& snapshots);

}  // namespace levyfp
