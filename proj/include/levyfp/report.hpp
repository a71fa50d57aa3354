#pragma once

#include "levyfp/analysis.hpp"
#include "levyfp/scenario.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace levyfp {

/// A file could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SnapshotSummary {
    double t = 0.0;
    double mass = 0.0;  ///< b h sum_j V_j
    double min = 0.0;
    double max = 0.0;
    double argmax_x = 0.0;
};

struct RunReport {
    std::string name;
    std::string config;  ///< canonical text of the resolved run
    std::string scheme;
    bool positivity_preserving = true;
    double dt = 0.0;
    long steps = 0;
    std::vector<SnapshotSummary> snapshots;
    std::vector<double> step_seconds;
    std::vector<int> step_iterations;
    double total_seconds = 0.0;
    double max_principle_margin = 0.0;
    bool max_principle_satisfied = false;
    double global_min = 0.0;
    double global_max = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::string> files;
};

/// Summarizes a finished run. Adds a warning when any step has min < -1e-12
/// and, under the absorbing condition, when the mass grows by more than 1e-8
/// between steps.
[[nodiscard]] RunReport make_report(const ScenarioConfig& cfg, const DiscreteOperator& op, const Trajectory& traj,
                                    double total_seconds);

/// JSON document of the report.
[[nodiscard]] std::string to_json(const RunReport& report);

/// %.17g, which round-trips every double.
[[nodiscard]] std::string format_double(double v);

/// Columns x,p; the header carries the time as `# t = ...`.
void write_snapshot_csv(const std::string& path, const Snapshot& s);
[[nodiscard]] Snapshot read_snapshot_csv(const std::string& path);

/// Long format: columns t,x,p for all snapshots in one file.
void write_long_csv(const std::string& path, const std::vector<Snapshot>& snapshots);
[[nodiscard]] std::vector<Snapshot> read_long_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace levyfp
