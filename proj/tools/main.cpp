#include "nhfi/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using nhfi::ExperimentConfig;
using nhfi::RunResult;

void print_summary(const RunResult& result) {
    const auto stats = nhfi::drift_metrics(result.record);
    std::printf("system: %s   samples: %zu%s\n", result.entry.name.c_str(),
                result.record.times.size(),
                result.record.failed ? "   [INTEGRATION FAILED]" : "");
    std::printf("%-12s %14s %14s\n", "channel", "max|value|", "|final|");
    for (const auto& s : stats) {
        std::printf("%-12s %14.6e %14.6e\n", s.name.c_str(), s.max_abs, s.final_abs);
    }
    if (result.record.failed) {
        std::printf("integration failed at step %lld\n",
                    static_cast<long long>(result.record.failure_step));
    }
}

ExperimentConfig load_with_overrides(const std::string& path,
                                     const std::vector<std::string>& overrides) {
    ExperimentConfig cfg = nhfi::load_config(path);
    for (const auto& ov : overrides) nhfi::apply_override(cfg, ov);
    return cfg;
}

void route_outputs(ExperimentConfig& cfg, const std::string& out_dir, const std::string& stem) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    const auto join = [&](const std::string& configured, const char* ext) {
        const std::string name = configured.empty()
                                     ? stem + ext
                                     : std::filesystem::path(configured).filename().string();
        return (std::filesystem::path(out_dir) / name).string();
    };
    cfg.csv_path = join(cfg.csv_path, ".csv");
    cfg.svg_path = join(cfg.svg_path, ".svg");
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides) {
    ExperimentConfig cfg = load_with_overrides(config_path, overrides);
    route_outputs(cfg, out_dir, cfg.system);
    const RunResult result = nhfi::run_experiment(cfg);
    print_summary(result);
    if (!cfg.csv_path.empty()) std::printf("csv: %s\n", cfg.csv_path.c_str());
    if (!cfg.svg_path.empty()) std::printf("svg: %s\n", cfg.svg_path.c_str());
    return result.record.failed ? 1 : 0;
}

int cmd_sweep(const std::string& config_path, const std::string& dts_csv,
              const std::string& out_dir, const std::vector<std::string>& overrides) {
    std::vector<double> dts;
    {
        std::string item;
        std::stringstream ss(dts_csv);
        while (std::getline(ss, item, ',')) dts.push_back(std::strtod(item.c_str(), nullptr));
    }
    if (dts.empty()) throw nhfi::ConfigError("sweep needs at least one dt");

    const ExperimentConfig base = load_with_overrides(config_path, overrides);
    std::vector<RunResult> results(dts.size());
    std::vector<std::string> errors(dts.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int leg = 0; leg < static_cast<int>(dts.size()); ++leg) {
        try {
            ExperimentConfig cfg = base;
            cfg.dt = dts[leg];
            char stem[128];
            std::snprintf(stem, sizeof(stem), "%s_dt%g", cfg.system.c_str(), dts[leg]);
            route_outputs(cfg, out_dir, stem);
            results[leg] = nhfi::run_experiment(cfg);
        } catch (const std::exception& e) {
            errors[leg] = e.what();
        }
    }

    bool ok = true;
    for (std::size_t leg = 0; leg < dts.size(); ++leg) {
        if (!errors[leg].empty()) {
            std::printf("dt=%-10g ERROR: %s\n", dts[leg], errors[leg].c_str());
            ok = false;
            continue;
        }
        std::printf("dt=%-10g", dts[leg]);
        for (const auto& s : nhfi::drift_metrics(results[leg].record)) {
            std::printf("  max|%s|=%.3e", s.name.c_str(), s.max_abs);
        }
        std::printf("%s\n", results[leg].record.failed ? "  [FAILED]" : "");
        ok = ok && !results[leg].record.failed;
    }
    return ok ? 0 : 1;
}

int cmd_compare(const std::string& config_a, const std::string& config_b,
                const std::string& out_dir, const std::vector<std::string>& overrides) {
    ExperimentConfig cfg_a = load_with_overrides(config_a, overrides);
    ExperimentConfig cfg_b = load_with_overrides(config_b, overrides);
    route_outputs(cfg_a, out_dir, cfg_a.system + "_a");
    route_outputs(cfg_b, out_dir, cfg_b.system + "_b");

    const RunResult a = nhfi::run_experiment(cfg_a);
    const RunResult b = nhfi::run_experiment(cfg_b);
    std::printf("--- first run ---\n");
    print_summary(a);
    std::printf("--- second run ---\n");
    print_summary(b);

    if (cfg_a.poincare && cfg_b.poincare && a.entry.poincare && b.entry.poincare) {
        const auto& ev = *a.entry.poincare;
        const auto sec_a = nhfi::poincare_section(a.record, ev.coordinate, ev.rate_coordinate);
        const auto sec_b = nhfi::poincare_section(b.record, ev.coordinate, ev.rate_coordinate);
        std::printf("--- Poincare sections ---\n");
        std::printf("crossings: %zu vs %zu\n", sec_a.size(), sec_b.size());
        for (const auto& plane : ev.planes) {
            std::vector<nhfi::Vec2> pa, pb;
            for (const auto& pt : sec_a) pa.emplace_back(pt.state[plane.i], pt.state[plane.j]);
            for (const auto& pt : sec_b) pb.emplace_back(pt.state[plane.i], pt.state[plane.j]);
            if (pa.empty() || pb.empty()) {
                std::printf("plane %-4s: empty section\n", plane.name.c_str());
                continue;
            }
            std::printf("plane %-4s: Hausdorff distance %.6f\n", plane.name.c_str(),
                        nhfi::hausdorff_distance(pa, pb));
        }
    }
    return (a.record.failed || b.record.failed) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feedback-stabilized integration of nonholonomic mechanical systems"};
    app.require_subcommand(1);

    std::string config_path, config_path2, out_dir, dts;
    std::vector<std::string> overrides;

    auto* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory for CSV/SVG");
    run->add_option("--override", overrides, "section.key=value override (repeatable)");

    auto* sweep = app.add_subcommand("sweep", "run the same experiment across step sizes");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--dts", dts, "comma-separated step sizes")->required();
    sweep->add_option("--out", out_dir, "output directory for per-leg CSV/SVG");
    sweep->add_option("--override", overrides, "section.key=value override (repeatable)");

    auto* compare = app.add_subcommand("compare", "run two configs and report joint diagnostics");
    compare->add_option("--config", config_path, "first config file")->required();
    compare->add_option("--config2", config_path2, "second config file")->required();
    compare->add_option("--out", out_dir, "output directory for CSV/SVG");
    compare->add_option("--override", overrides, "override applied to both runs (repeatable)");

    auto* list = app.add_subcommand("list", "list the system catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& name : nhfi::catalog_names()) std::printf("%s\n", name.c_str());
            return 0;
        }
        if (run->parsed()) return cmd_run(config_path, out_dir, overrides);
        if (sweep->parsed()) return cmd_sweep(config_path, dts, out_dir, overrides);
        if (compare->parsed()) return cmd_compare(config_path, config_path2, out_dir, overrides);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
