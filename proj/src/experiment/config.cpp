#include "nhfi/experiment.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

namespace nhfi {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0') {
        throw ConfigError("invalid number '" + value + "' for key '" + key + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(key, trim(item)));
    }
    if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
    if (value == "off" || value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("invalid boolean '" + value + "' for key '" + key + "'");
}

StepperKind parse_stepper(const std::string& value, bool& use_dla) {
    use_dla = false;
    if (value == "euler") return StepperKind::Euler;
    if (value == "rk4") return StepperKind::RK4;
    if (value == "dla") {
        use_dla = true;
        return StepperKind::Euler;
    }
    throw ConfigError("unknown stepper '" + value + "' (use euler|rk4|dla)");
}

void set_entry(ExperimentConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
    if (section == "experiment") {
        if (key == "system") cfg.system = value;
        else if (key == "chart") cfg.system_options.chart = value;
        else if (key == "variant") cfg.system_options.variant = value;
        else if (key == "energy_mode") cfg.system_options.energy_mode = value;
        else if (key == "stepper") cfg.stepper = parse_stepper(value, cfg.use_dla);
        else if (key == "dt") cfg.dt = parse_double(key, value);
        else if (key == "horizon") cfg.horizon = parse_double(key, value);
        else if (key == "feedback") cfg.feedback = parse_bool(key, value);
        else if (key == "poincare") cfg.poincare = parse_bool(key, value);
        else if (key == "reference") cfg.reference = parse_bool(key, value);
        else if (key == "csv_stride") cfg.csv_stride = static_cast<int>(parse_double(key, value));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_double(key, value));
        else if (key == "gain_matrix") cfg.gain_matrix = parse_list(key, value);
        else throw ConfigError("unknown key '" + key + "' in [experiment]");
    } else if (section == "params") {
        if (value.find(',') != std::string::npos) {
            cfg.system_options.vec_params[key] = parse_list(key, value);
        } else {
            cfg.system_options.params[key] = parse_double(key, value);
        }
    } else if (section == "gains") {
        cfg.gains[key] = parse_double(key, value);
    } else if (section == "targets") {
        cfg.targets[key] = parse_double(key, value);
    } else if (section == "initial") {
        if (key == "state") cfg.initial_state = parse_list(key, value);
        else throw ConfigError("unknown key '" + key + "' in [initial]");
    } else if (section == "output") {
        if (key == "csv") cfg.csv_path = value;
        else if (key == "svg") cfg.svg_path = value;
        else throw ConfigError("unknown key '" + key + "' in [output]");
    } else {
        throw ConfigError("unknown config section [" + section + "]");
    }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::string section = "experiment";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
        set_entry(cfg, section, key, value);
    }
    if (cfg.system.empty()) throw ConfigError("config does not name a system");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

void apply_override(ExperimentConfig& config, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override must look like section.key=value, got '" + spec + "'");
    }
    const std::string path = trim(spec.substr(0, eq));
    const std::string value = trim(spec.substr(eq + 1));
    const auto dot = path.find('.');
    if (dot == std::string::npos) {
        set_entry(config, "experiment", path, value);
    } else {
        set_entry(config, path.substr(0, dot), path.substr(dot + 1), value);
    }
}

}  // namespace nhfi
