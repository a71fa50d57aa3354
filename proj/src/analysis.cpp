#include "levyfp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levyfp {

namespace {

ErrorNorms accumulate_errors(const std::vector<double>& x, const std::vector<double>& err) {
    ErrorNorms out;
    for (std::size_t i = 0; i < err.size(); ++i) {
        out.sup_error = std::max(out.sup_error, err[i]);
        if (i > 0) {
            out.l1_error += 0.5 * (x[i] - x[i - 1]) * (err[i] + err[i - 1]);
        }
    }
    return out;
}

bool in_window(double x, const std::optional<std::pair<double, double>>& window) {
    return !window || (x > window->first && x <= window->second);
}

}  // namespace

Snapshot to_snapshot(const DiscreteOperator& op, const Frame& frame) {
    Snapshot s;
    s.t = frame.t;
    s.b = op.params.b;
    s.x_nodes.resize(op.size());
    for (std::size_t i = 0; i < op.size(); ++i) {
        s.x_nodes[i] = op.params.b * op.grid.node(op.grid.index_to_node(i));
    }
    s.p_values = frame.V;
    return s;
}

double exact_levy_density(double x, double t) {
    if (!(t > 0.0)) {
        throw std::domain_error("exact_levy_density: t must be > 0");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    return t / std::sqrt(2.0 * std::numbers::pi) * std::pow(x, -1.5) * std::exp(-t * t / (2.0 * x));
}

ErrorNorms error_norms(const Snapshot& num, const std::function<double(double)>& exact,
                       std::optional<std::pair<double, double>> window) {
    if (num.x_nodes.size() != num.p_values.size()) {
        throw std::invalid_argument("error_norms: snapshot has mismatched node and value counts");
    }
    if (num.x_nodes.empty()) throw std::invalid_argument("error_norms: empty snapshot");
    std::vector<double> x, err;
    for (std::size_t i = 0; i < num.x_nodes.size(); ++i) {
        if (!in_window(num.x_nodes[i], window)) continue;
        x.push_back(num.x_nodes[i]);
        err.push_back(std::abs(num.p_values[i] - exact(num.x_nodes[i])));
    }
    return accumulate_errors(x, err);
}

ErrorNorms error_norms(const Snapshot& num, const Snapshot& ref, std::optional<std::pair<double, double>> window) {
    if (ref.x_nodes.size() < 2 || num.x_nodes.empty()) {
        throw std::invalid_argument("error_norms: empty snapshot");
    }
    const double dx_ref = ref.x_nodes[1] - ref.x_nodes[0];
    std::vector<double> x, err;
    for (std::size_t i = 0; i < num.x_nodes.size(); ++i) {
        const double xi = num.x_nodes[i];
        if (!in_window(xi, window)) continue;
        const double pos = (xi - ref.x_nodes.front()) / dx_ref;
        const long k = std::lround(pos);
        if (k < 0 || static_cast<std::size_t>(k) >= ref.x_nodes.size() ||
            std::abs(ref.x_nodes[static_cast<std::size_t>(k)] - xi) > 1e-9 * std::max(1.0, std::abs(xi))) {
            throw std::invalid_argument("error_norms: reference grid does not contain node x = " + std::to_string(xi));
        }
        x.push_back(xi);
        err.push_back(std::abs(num.p_values[i] - ref.p_values[static_cast<std::size_t>(k)]));
    }
    return accumulate_errors(x, err);
}

double total_mass(const Snapshot& s) {
    if (s.x_nodes.empty()) {
        return 0.0;
    }
    double mass = 0.5 * (s.x_nodes.front() + s.b) * s.p_values.front();
    for (std::size_t i = 1; i < s.x_nodes.size(); ++i) {
        mass += 0.5 * (s.x_nodes[i] - s.x_nodes[i - 1]) * (s.p_values[i] + s.p_values[i - 1]);
    }
    mass += 0.5 * (s.b - s.x_nodes.back()) * s.p_values.back();
    return mass;
}

double mirror_check(const Trajectory& plus, const Trajectory& minus) {
    if (plus.frames.size() != minus.frames.size()) {
        throw std::invalid_argument("mirror_check: trajectories have different numbers of frames");
    }
    double worst = 0.0;
    for (std::size_t f = 0; f < plus.frames.size(); ++f) {
        const auto& a = plus.frames[f];
        const auto& b = minus.frames[f];
        if (a.V.size() != b.V.size()) {
            throw std::invalid_argument("mirror_check: trajectories live on different grids");
        }
        if (std::abs(a.t - b.t) > 1e-12 * std::max(1.0, std::abs(a.t))) {
            throw std::invalid_argument("mirror_check: output times differ");
        }
        const std::size_t n = a.V.size();
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(a.V[i] - b.V[n - 1 - i]));
        }
    }
    return worst;
}

std::vector<MpppPoint> mppp(const std::vector<Snapshot>& snapshots) {
    if (snapshots.empty()) {
        throw std::invalid_argument("mppp: empty trajectory");
    }
    std::vector<MpppPoint> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) {
        MpppPoint pt;
        pt.t = s.t;
        const auto& p = s.p_values;
        const auto& x = s.x_nodes;
        std::size_t best = 0;
        for (std::size_t i = 1; i < p.size(); ++i) {
            if (p[i] > p[best] || (p[i] == p[best] && std::abs(x[i]) < std::abs(x[best]))) {
                best = i;
            }
        }
        pt.defined = !p.empty() && std::any_of(p.begin(), p.end(), [](double v) { return v != 0.0; });
        if (pt.defined) {
            pt.x_node = x[best];
            pt.x_refined = x[best];
            if (best > 0 && best + 1 < p.size()) {
                const double curvature = p[best - 1] - 2.0 * p[best] + p[best + 1];
                if (curvature < 0.0) {
                    const double dx = 0.5 * (x[best + 1] - x[best - 1]);
                    pt.x_refined = x[best] + dx * 0.5 * (p[best - 1] - p[best + 1]) / curvature;
                }
            }
        }
        out.push_back(pt);
    }
    return out;
}

std::vector<MpppPoint> mppp(const DiscreteOperator& op, const Trajectory& traj) {
    std::vector<Snapshot> snaps;
    snaps.reserve(traj.frames.size());
    for (const auto& f : traj.frames) snaps.push_back(to_snapshot(op, f));
    return mppp(snaps);
}

}  // namespace levyfp
