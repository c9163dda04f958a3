#include "nhfi/experiment.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nhfi;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig config_from_string(const std::string& text) {
    std::stringstream ss(text);
    return parse_config(ss);
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("full file") {
        const auto cfg = config_from_string(
            "[experiment]\n"
            "system = suslov\n"
            "stepper = rk4\n"
            "dt = 1e-4\n"
            "horizon = 2.5   # trailing comment\n"
            "feedback = off\n"
            "csv_stride = 5\n"
            "[gains]\n"
            "J = 10\n"
            "manifold = 20\n"
            "[targets]\n"
            "h = 0.75\n"
            "[output]\n"
            "csv = out.csv\n");
        CHECK(cfg.system == "suslov");
        CHECK(cfg.stepper == StepperKind::RK4);
        CHECK(cfg.dt == 1e-4);
        CHECK(cfg.horizon == 2.5);
        CHECK_FALSE(cfg.feedback);
        CHECK(cfg.csv_stride == 5);
        CHECK(cfg.gains.at("J") == 10);
        CHECK(cfg.gains.at("manifold") == 20);
        CHECK(cfg.targets.at("h") == 0.75);
        CHECK(cfg.csv_path == "out.csv");
    }
    SUBCASE("overrides") {
        auto cfg = config_from_string("system = oscillator\n");
        apply_override(cfg, "dt=5e-4");
        apply_override(cfg, "gains.J=42");
        apply_override(cfg, "params.m=2.0");
        CHECK(cfg.dt == 5e-4);
        CHECK(cfg.gains.at("J") == 42);
        CHECK(cfg.system_options.params.at("m") == 2.0);
    }
    SUBCASE("errors are structured") {
        CHECK_THROWS_AS(config_from_string("dt = 1e-3\n"), ConfigError);          // no system
        CHECK_THROWS_AS(config_from_string("system = s\nnot-a-kv-line\n"), ConfigError);
        CHECK_THROWS_AS(config_from_string("system = s\nbogus = 1\n"), ConfigError);
        CHECK_THROWS_AS(config_from_string("system = s\ndt = abc\n"), ConfigError);
        CHECK_THROWS_AS(config_from_string("[nope]\nx = 1\n"), ConfigError);
    }
}

TEST_CASE("run_experiment validation") {
    SUBCASE("unknown system") {
        ExperimentConfig cfg;
        cfg.system = "perpetuum-mobile";
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
    SUBCASE("dla requires the oscillator") {
        ExperimentConfig cfg;
        cfg.system = "suslov";
        cfg.use_dla = true;
        cfg.horizon = 0.1;
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
    SUBCASE("initial state must match the layout") {
        ExperimentConfig cfg;
        cfg.system = "oscillator";
        cfg.initial_state = std::vector<double>{1.0, 2.0};
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
    SUBCASE("disk targets are checked against the constraint set") {
        ExperimentConfig cfg;
        cfg.system = "vertical-disk";
        cfg.horizon = 0.01;
        cfg.targets["Pi_y"] = 0.3;
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
    SUBCASE("negative gains are rejected") {
        ExperimentConfig cfg;
        cfg.system = "oscillator";
        cfg.horizon = 0.01;
        cfg.gains["J"] = -1.0;
        CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    }
}

TEST_CASE("zero-horizon run produces a single sample with zero deviations") {
    ExperimentConfig cfg;
    cfg.system = "suslov";
    cfg.horizon = 0.0;
    const auto result = run_experiment(cfg);
    CHECK(result.record.times.size() == 1);
    for (const auto& stat : drift_metrics(result.record)) {
        CAPTURE(stat.name);
        if (stat.name.rfind("dPi", 0) == 0 || stat.name[0] == 'd') {
            CHECK(stat.max_abs == 0.0);
        }
    }
}

TEST_CASE("suslov channel registry") {
    ExperimentConfig cfg;
    cfg.system = "suslov";
    cfg.horizon = 0.01;
    const auto result = run_experiment(cfg);
    const auto& names = result.record.channel_names;
    REQUIRE(names.size() >= 7);
    CHECK(names[0] == "dPi1");
    CHECK(names[1] == "dPi2");
    CHECK(names[2] == "dPi3");
    CHECK(names[3] == "defect");
    CHECK(names[4] == "dJ");
    CHECK(names[5] == "dh");
    CHECK(names.back() == "V");
}

TEST_CASE("poincare section") {
    SUBCASE("cosine crossings") {
        TrajectoryRecord rec;
        const double dt = 1e-3;
        const double t_end = 4.0 * 3.14159265358979323846;
        for (double t = 0.0; t <= t_end; t += dt) {
            rec.state_times.push_back(t);
            VecX x(2);
            x << std::cos(t), -std::sin(t);  // y and ydot
            rec.states.push_back(x);
        }
        const auto pts = poincare_section(rec, 0, 1);
        REQUIRE(pts.size() == 2);
        CHECK(std::abs(pts[0].t - 3.0 * 3.14159265358979323846 / 2.0) <= dt);
        CHECK(std::abs(pts[1].t - 7.0 * 3.14159265358979323846 / 2.0) <= dt);
    }
    SUBCASE("no crossings for a constant coordinate") {
        TrajectoryRecord rec;
        for (int i = 0; i < 100; ++i) {
            rec.state_times.push_back(i * 0.1);
            rec.states.push_back(VecX::Ones(2));
        }
        CHECK(poincare_section(rec, 0, 1).empty());
    }
}

TEST_CASE("drift metrics") {
    TrajectoryRecord rec;
    rec.channel_names = {"zero", "wave"};
    rec.channels.resize(2);
    rec.channel_abs_max = {0.0, 0.0};
    rec.channel_final = {0.0, 0.0};
    for (int i = 0; i <= 10000; ++i) {
        const double t = i * 1e-3;
        rec.times.push_back(t);
        rec.channels[0].push_back(0.0);
        const double w = std::abs(std::sin(t));
        rec.channels[1].push_back(w);
        rec.channel_abs_max[1] = std::max(rec.channel_abs_max[1], w);
        rec.channel_final[1] = w;
    }
    const auto stats = drift_metrics(rec);
    CHECK(stats[0].max_abs == 0.0);
    CHECK(stats[0].final_abs == 0.0);
    CHECK(stats[1].max_abs == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("csv output") {
    SUBCASE("empty record yields a header-only file") {
        TrajectoryRecord rec;
        rec.channel_names = {"a", "b"};
        rec.channels.resize(2);
        const auto path = temp_path("nhfi_empty.csv");
        emit_csv(rec, path);
        CHECK(slurp(path) == "t,a,b\n");
    }
    SUBCASE("round trip is bit exact") {
        ExperimentConfig cfg;
        cfg.system = "suslov";
        cfg.horizon = 0.05;
        cfg.csv_stride = 3;
        const auto result = run_experiment(cfg);
        const auto path = temp_path("nhfi_roundtrip.csv");
        emit_csv(result.record, path);
        const auto table = read_csv(path);
        REQUIRE(table.header.size() == result.record.channel_names.size() + 1);
        for (std::size_t i = 0; i < result.record.times.size(); ++i) {
            CHECK(table.columns[0][i] == result.record.times[i]);
            for (std::size_t c = 0; c < result.record.channels.size(); ++c) {
                CHECK(table.columns[c + 1][i] == result.record.channels[c][i]);
            }
        }
    }
}

TEST_CASE("svg output is well formed") {
    ExperimentConfig cfg;
    cfg.system = "oscillator";
    cfg.horizon = 0.1;
    const auto result = run_experiment(cfg);
    const auto path = temp_path("nhfi_plot.svg");
    emit_svg(result.record, path);
    const std::string svg = slurp(path);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("determinism: identical configs give bit-identical CSV") {
    ExperimentConfig cfg;
    cfg.system = "oscillator";
    cfg.horizon = 0.5;
    cfg.csv_path = temp_path("nhfi_det_a.csv");
    run_experiment(cfg);
    const std::string a = slurp(cfg.csv_path);
    cfg.csv_path = temp_path("nhfi_det_b.csv");
    run_experiment(cfg);
    CHECK(a == slurp(cfg.csv_path));
    CHECK(!a.empty());
}

TEST_CASE("all-zero gains reproduce the plain field bit-exactly") {
    ExperimentConfig plain;
    plain.system = "knife-edge";
    plain.horizon = 0.5;
    plain.feedback = false;
    ExperimentConfig zeroed = plain;
    zeroed.feedback = true;
    for (const char* name : {"J1", "J2", "H"}) zeroed.gains[name] = 0.0;

    const auto a = run_experiment(plain);
    const auto b = run_experiment(zeroed);
    REQUIRE(a.record.states.size() == b.record.states.size());
    for (std::size_t i = 0; i < a.record.states.size(); ++i) {
        CHECK((a.record.states[i] - b.record.states[i]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("hausdorff distance") {
    std::vector<Vec2> a = {{0, 0}, {1, 0}};
    std::vector<Vec2> b = {{0, 0.5}, {1, 0}};
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.5));
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK_THROWS_AS(hausdorff_distance({}, a), Error);
}
