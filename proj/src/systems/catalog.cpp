#include "nhfi/systems.hpp"

#include <cmath>

namespace nhfi {

const IntegralSpec& SystemEntry::integral(std::string_view name) const {
    for (const auto& f : integrals) {
        if (f.name == name) return f;
    }
    throw Error("system '" + this->name + "' has no integral named '" + std::string(name) + "'");
}

IntegralSpec& SystemEntry::integral(std::string_view name) {
    for (auto& f : integrals) {
        if (f.name == name) return f;
    }
    throw Error("system '" + this->name + "' has no integral named '" + std::string(name) + "'");
}

namespace detail {

void default_targets(SystemEntry& entry) {
    for (auto& f : entry.integrals) {
        f.target = f.value(entry.initial_state);
    }
}

Mat3 random_rotation3(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vec3 axis;
    do {
        axis = Vec3(unit(rng), unit(rng), unit(rng));
    } while (axis.norm() < 1e-3);
    axis.normalize();
    const double angle = 3.14159265358979323846 * unit(rng);
    const Mat3 k = hat(axis);
    return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

Mat2 random_rotation2(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-3.14159265358979323846, 3.14159265358979323846);
    const double a = unit(rng);
    Mat2 r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
}

}  // namespace detail

namespace {

double scalar_param(const SystemOptions& opt, const std::string& key, double fallback) {
    auto it = opt.params.find(key);
    return it == opt.params.end() ? fallback : it->second;
}

EnergyMode parse_mode(const std::string& s) {
    if (s.empty()) return EnergyMode::SystemDefault;
    if (s == "original") return EnergyMode::Original;
    if (s == "extended") return EnergyMode::Extended;
    throw ConfigError("unknown energy mode '" + s + "' (use original|extended)");
}

}  // namespace

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {
        "suslov",       "knife-edge", "chaplygin-sleigh", "vertical-disk",
        "roller-racer", "heisenberg", "oscillator",
    };
    return names;
}

SystemEntry make_system(const std::string& name, const SystemOptions& options) {
    const EnergyMode mode = parse_mode(options.energy_mode);
    if (name == "suslov") {
        SuslovParams p;
        if (auto it = options.vec_params.find("inertia"); it != options.vec_params.end()) {
            if (it->second.size() != 9) throw ConfigError("suslov inertia needs 9 entries");
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) p.inertia(i, j) = it->second[3 * i + j];
        }
        if (auto it = options.vec_params.find("a"); it != options.vec_params.end()) {
            if (it->second.size() != 3) throw ConfigError("suslov a needs 3 entries");
            p.axis = Vec3(it->second[0], it->second[1], it->second[2]);
        }
        return suslov_entry(p, mode);
    }
    if (name == "knife-edge") {
        KnifeEdgeParams p;
        p.m = scalar_param(options, "m", p.m);
        p.inertia = scalar_param(options, "J", p.inertia);
        p.gravity = scalar_param(options, "g", p.gravity);
        p.incline = scalar_param(options, "alpha", p.incline);
        return knife_edge_entry(p, mode);
    }
    if (name == "chaplygin-sleigh") {
        SleighParams p;
        p.m = scalar_param(options, "m", p.m);
        p.inertia = scalar_param(options, "I", p.inertia);
        p.offset = scalar_param(options, "a", p.offset);
        SleighChart chart = SleighChart::EmbeddedSO2;
        if (options.chart == "angle") chart = SleighChart::Angle;
        else if (!options.chart.empty() && options.chart != "embedded")
            throw ConfigError("unknown sleigh chart '" + options.chart + "' (use angle|embedded)");
        return chaplygin_sleigh_entry(p, chart, mode);
    }
    if (name == "vertical-disk") {
        DiskParams p;
        p.m = scalar_param(options, "m", p.m);
        p.roll_inertia = scalar_param(options, "J", p.roll_inertia);
        p.spin_inertia = scalar_param(options, "I", p.spin_inertia);
        p.radius = scalar_param(options, "R", p.radius);
        DiskVariant variant = DiskVariant::Frozen;
        if (options.variant == "extended") variant = DiskVariant::Extended;
        else if (!options.variant.empty() && options.variant != "frozen")
            throw ConfigError("unknown disk variant '" + options.variant +
                              "' (use frozen|extended)");
        return vertical_disk_entry(p, variant);
    }
    if (name == "roller-racer") {
        RacerParams p;
        p.m = scalar_param(options, "m", p.m);
        p.body_inertia = scalar_param(options, "I1", p.body_inertia);
        p.coupler_inertia = scalar_param(options, "I2", p.coupler_inertia);
        p.d1 = scalar_param(options, "d1", p.d1);
        p.d2 = scalar_param(options, "d2", p.d2);
        return roller_racer_entry(p, mode);
    }
    if (name == "heisenberg") return heisenberg_entry();
    if (name == "oscillator") return oscillator_entry(mode);
    throw ConfigError("unknown system '" + name + "'");
}

}  // namespace nhfi
