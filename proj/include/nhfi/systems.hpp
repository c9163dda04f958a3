#pragma once

#include "nhfi/extension.hpp"
#include "nhfi/feedback.hpp"
#include "nhfi/integral.hpp"
#include "nhfi/steppers.hpp"

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace nhfi {

enum class EnergyMode { SystemDefault, Original, Extended };

struct SuslovParams {
    Mat3 inertia = (Mat3() << 1, 0, 0, 0, 1, 1, 0, 1, 2).finished();
    Vec3 axis = Vec3(0, 0, 1);  // constraint direction a; e = I^{-1}a / sqrt(a . I^{-1} a)
};

struct KnifeEdgeParams {
    double m = 1.0;
    double inertia = 1.0;  // J
    double gravity = 1.0;
    double incline = 0.52359877559829887;  // pi/6
};

struct SleighParams {
    double m = 1.0;
    double inertia = 1.0;  // I
    double offset = 1.0;   // a
};
enum class SleighChart { Angle, EmbeddedSO2 };

struct DiskParams {
    double m = 1.0;
    double roll_inertia = 1.0;  // J, about an axis in the plane of the disk
    double spin_inertia = 1.0;  // I, about the axis perpendicular to the disk
    double radius = 1.0;        // R
};
enum class DiskVariant { Extended, Frozen };

struct RacerParams {
    double m = 1.0;
    double body_inertia = 1.0;     // I1
    double coupler_inertia = 1.0;  // I2
    double d1 = 1.0;
    double d2 = 1.0;
};

/// A ready-made system: extended field, declared first integrals with
/// default gains, Lyapunov penalties, initial condition, exact solution
/// where one is known, and test samplers.
struct SystemEntry {
    struct ExactReference {
        std::vector<std::string> names;    // per-component error channel names
        std::vector<int> indices;          // tracked state indices
        std::function<VecX(double)> eval;  // tracked components at time t
    };
    struct PoincareEvent {
        int coordinate = 0;       // section surface: this coordinate crosses zero
        int rate_coordinate = 0;  // its velocity; upward crossings only
        struct Plane {
            std::string name;
            int i = 0;
            int j = 0;
        };
        std::vector<Plane> planes;  // snapshot planes, pairs of state indices
    };

    std::string name;
    ChartLayout layout;
    VecX initial_state;
    ExtendedField field;
    std::vector<IntegralSpec> integrals;  // declared; targets default to values at initial_state
    std::vector<ManifoldPenalty> penalties;
    std::optional<ExactReference> exact;
    std::function<VecX(std::mt19937_64&)> sample_state;
    std::function<VecX(std::mt19937_64&)> sample_zero_set;  // states with V = 0 at default targets
    std::function<void(const std::vector<IntegralSpec>&)> validate_targets;
    bool has_dla = false;
    StepperKind default_stepper = StepperKind::Euler;
    double default_dt = 1e-3;
    double default_horizon = 10.0;
    std::optional<PoincareEvent> poincare;

    const IntegralSpec& integral(std::string_view name) const;
    IntegralSpec& integral(std::string_view name);
};

SystemEntry suslov_entry(const SuslovParams& params = {},
                         EnergyMode mode = EnergyMode::SystemDefault);
SystemEntry knife_edge_entry(const KnifeEdgeParams& params = {},
                             EnergyMode mode = EnergyMode::SystemDefault);
SystemEntry chaplygin_sleigh_entry(const SleighParams& params = {},
                                   SleighChart chart = SleighChart::EmbeddedSO2,
                                   EnergyMode mode = EnergyMode::SystemDefault);
SystemEntry vertical_disk_entry(const DiskParams& params = {},
                                DiskVariant variant = DiskVariant::Frozen);
SystemEntry roller_racer_entry(const RacerParams& params = {},
                               EnergyMode mode = EnergyMode::SystemDefault);
SystemEntry heisenberg_entry();
SystemEntry oscillator_entry(EnergyMode mode = EnergyMode::SystemDefault);

/// Options resolved from experiment configs.
struct SystemOptions {
    std::map<std::string, double> params;
    std::map<std::string, std::vector<double>> vec_params;
    std::string chart;        // sleigh: "angle" | "embedded"
    std::string variant;      // disk: "frozen" | "extended"
    std::string energy_mode;  // "" | "original" | "extended"
};

const std::vector<std::string>& catalog_names();
SystemEntry make_system(const std::string& name, const SystemOptions& options = {});

namespace detail {
/// Fills in target = value(initial_state) for every integral.
void default_targets(SystemEntry& entry);
/// Random rotation matrices for test samplers.
Mat3 random_rotation3(std::mt19937_64& rng);
Mat2 random_rotation2(std::mt19937_64& rng);
}  // namespace detail

}  // namespace nhfi
