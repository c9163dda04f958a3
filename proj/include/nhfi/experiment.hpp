#pragma once

#include "nhfi/feedback.hpp"
#include "nhfi/steppers.hpp"
#include "nhfi/systems.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nhfi {

/// A fully described experiment: which system, how to integrate it, which
/// gains and targets to stabilize, and where the results go.
struct ExperimentConfig {
    std::string system;
    SystemOptions system_options;
    std::optional<std::vector<double>> initial_state;
    StepperKind stepper = StepperKind::Euler;
    bool use_dla = false;
    double dt = 0.0;        // 0 => system default
    double horizon = -1.0;  // < 0 => system default
    std::map<std::string, double> gains;    // per integral name; "manifold" for penalty blocks
    std::map<std::string, double> targets;  // per integral name; default F(initial state)
    bool feedback = true;
    bool poincare = false;
    bool reference = true;  // attach exact-error channels when available
    std::optional<std::vector<double>> gain_matrix;  // row-major, dim x dim
    std::string csv_path;
    std::string svg_path;
    int csv_stride = 10;
    std::uint64_t seed = 0;  // reserved for sampling features; keeps runs reproducible
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Applies one "section.key=value" override.
void apply_override(ExperimentConfig& config, const std::string& spec);

struct RunResult {
    TrajectoryRecord record;
    SystemEntry entry;  // with resolved gains and targets
    LyapunovSpec lyapunov;
};

/// Builds the catalog entry, wraps it in the feedback field unless disabled,
/// integrates, and attaches diagnostic channels (exact-solution errors,
/// manifold defect, per-integral deviations and the Lyapunov value).
RunResult run_experiment(const ExperimentConfig& config);

struct ChannelStat {
    std::string name;
    double max_abs = 0.0;
    double final_abs = 0.0;
};
std::vector<ChannelStat> drift_metrics(const TrajectoryRecord& record);

struct PoincarePoint {
    double t = 0.0;
    VecX state;
};

/// Upward zero crossings of the given state coordinate, located by linear
/// interpolation between consecutive stored states.
std::vector<PoincarePoint> poincare_section(const TrajectoryRecord& record, int coordinate,
                                            int rate_coordinate);

void emit_csv(const TrajectoryRecord& record, const std::string& path);
void emit_svg(const TrajectoryRecord& record, const std::string& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};
CsvTable read_csv(const std::string& path);

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

}  // namespace nhfi
