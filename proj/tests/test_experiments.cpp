#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "biphoton/errors.hpp"
#include "biphoton/experiments.hpp"
#include "biphoton/io.hpp"

using namespace biphoton;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("biphoton_exp_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

// Paper-geometry bench with a 3 um birth zone and grids sized for speed.
ExperimentConfig bench_config() {
    ExperimentConfig cfg = parse_config_text(R"(
crystal.birth_zone_b = 3e-6
pump.w0 = 30e-6
grids.slit_n = 1024
grids.det_n = 256
grids.det_extent = 2e-3
acquisition.frames = 4000
acquisition.nx = 100
acquisition.ny = 16
acquisition.mu_pairs = 4
acquisition.efficiency = 0.8
acquisition.background = 0.005
acquisition.seed = 20260809
)");
    return cfg;
}

std::string file_bytes(const std::string& path) { return read_text_file(path); }

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("analytic tables: circle identity holds on every row") {
    TempDir dir;
    run_analytic(bench_config(), dir.sub("analytic"));

    std::ifstream in(dir.sub("analytic") + "/analytic_visibilities.csv");
    REQUIRE(in.good());
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        // columns: theta, v_minus, v_plus, v_m, v_12, vm2_plus_v122
        std::array<double, 6> col{};
        size_t pos = 0;
        for (int c = 0; c < 6; ++c) {
            const size_t comma = line.find(',', pos);
            col[static_cast<size_t>(c)] =
                std::stod(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
            pos = comma + 1;
        }
        CHECK(col[1] + col[2] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(col[5] == doctest::Approx(1.0).epsilon(1e-12));
        ++rows;
    }
    CHECK(rows == 181);
}

TEST_CASE("simulate writes a symmetric JPD and three profiles") {
    TempDir dir;
    const ExperimentConfig cfg = bench_config();
    const PointResult point = run_simulate(cfg, dir.sub("sim"));
    CHECK(point.birth_zone_n == doctest::Approx(10.0));
    CHECK(point.jpd.p.sum() == doctest::Approx(1.0).epsilon(1e-12));

    const Bpf2Matrix jpd = read_bpf2(dir.sub("sim") + "/jpd.bpf2");
    CHECK(jpd.values.rows() == cfg.grids.det_n);
    CHECK((jpd.values - jpd.values.transpose()).cwiseAbs().maxCoeff() == 0.0);

    const FringeProfile marginal = read_profile_csv(dir.sub("sim") + "/marginal.csv");
    CHECK(marginal.kind == ProfileKind::marginal);
    CHECK(marginal.values.size() == static_cast<size_t>(cfg.grids.det_n));
    const FringeProfile corr = read_profile_csv(dir.sub("sim") + "/correlation.csv");
    CHECK(corr.values.size() == static_cast<size_t>(2 * cfg.grids.det_n - 1));
}

TEST_CASE("frames: smoke stack validates against the reader and is seed-deterministic") {
    TempDir dir;
    ExperimentConfig cfg = bench_config();
    cfg.acquisition.frames = 10;

    const std::string path_a = run_frames(cfg, dir.sub("a"));
    const std::string path_b = run_frames(cfg, dir.sub("b"));
    CHECK(file_bytes(path_a) == file_bytes(path_b));

    const FrameStack stack = read_bpfs(path_a);
    CHECK(stack.acquisition.frames == 10);
    CHECK(stack.acquisition.nx == cfg.acquisition.nx);

    cfg.acquisition.rng_seed += 1;
    const std::string path_c = run_frames(cfg, dir.sub("c"));
    CHECK(file_bytes(path_a) != file_bytes(path_c));
}

TEST_CASE("estimate: round trip from synthetic frames and offset invariance") {
    TempDir dir;
    ExperimentConfig cfg = bench_config();
    cfg.acquisition.frames = 6000;
    const std::string stack_path = run_frames(cfg, dir.sub("frames"));
    const EstimateResult est = run_estimate(stack_path, dir.sub("est"), cfg);

    // The estimated coincidence matrix is symmetric and fringe-bearing.
    CHECK((est.jpd - est.jpd.transpose()).cwiseAbs().maxCoeff() <
          1e-12 * est.jpd.cwiseAbs().maxCoeff());
    CHECK(est.marginal.values.size() == static_cast<size_t>(cfg.acquisition.nx));

    // Re-estimate from the same frames with a constant offset injected.
    FrameStack stack = read_bpfs(stack_path);
    for (auto& c : stack.counts) c = static_cast<uint16_t>(c + 5);
    const std::string shifted_path = dir.sub("shifted.bpfs");
    write_bpfs(shifted_path, stack);
    const EstimateResult est_shifted = run_estimate(shifted_path, dir.sub("est2"), cfg);
    const double scale = est.jpd.cwiseAbs().maxCoeff();
    CHECK((est.jpd - est_shifted.jpd).cwiseAbs().maxCoeff() < 1e-9 * scale);
}

TEST_CASE("fit driver: output file round-trips through the parser") {
    TempDir dir;
    const ExperimentConfig cfg = bench_config();
    const PointResult point = run_simulate(cfg, dir.sub("sim"));
    const FitResult fit = run_fit(dir.sub("sim") + "/marginal.csv", cfg, dir.sub("fit"));
    CHECK(fit.converged);

    const FitResult parsed = fit_result_from_json(read_text_file(dir.sub("fit") + "/fit.json"));
    CHECK(parsed.params.visibility == fit.params.visibility);
    CHECK(parsed.params.amplitude == fit.params.amplitude);
    CHECK(parsed.rms_residual == fit.rms_residual);
    CHECK(parsed.converged == fit.converged);
    CHECK(parsed.covariance(1, 1) == fit.covariance(1, 1));

    // The fitted marginal visibility agrees with the two-qubit bridge.
    CHECK(std::abs(fit.params.visibility - point.predicted.v_m) < 0.05);
}

TEST_CASE("sweep equals manual stage composition and classifies regimes") {
    TempDir dir;
    ExperimentConfig cfg = bench_config();
    cfg.sweep.w0_list = {6e-6, 30e-6, 51e-6, 102e-6}; // N = 2, 10, 17, 34
    const auto records = run_sweep(cfg, dir.sub("sweep"));
    REQUIRE(records.size() == 4);

    // Manual composition at one interior point.
    const PointResult point = simulate_point(cfg, 51e-6);
    const VisibilityFits fits = fit_profiles(point.marginal, point.correlation,
                                             point.correlation_paired, cfg.fit_geometry(),
                                             cfg.fit);
    CHECK(records[2].v_m == doctest::Approx(fits.v_m).epsilon(1e-14));
    CHECK(records[2].v_12 == doctest::Approx(fits.v_12).epsilon(1e-14));
    CHECK(records[2].circle_value == doctest::Approx(fits.circle.value).epsilon(1e-14));

    CHECK(records[0].regime == "I");
    CHECK(records[3].regime == "III");
    // Visibility order across the sweep.
    CHECK(records[0].v_m > records[1].v_m);
    CHECK(records[1].v_m > records[2].v_m);
    CHECK(records[2].v_m > records[3].v_m);
    CHECK(records[1].v_12 < records[2].v_12);
    CHECK(records[2].v_12 < records[3].v_12);
}

TEST_CASE("sweep outputs are byte-identical across reruns") {
    TempDir dir;
    ExperimentConfig cfg = bench_config();
    cfg.grids.det_n = 128;
    cfg.grids.slit_n = 512;
    cfg.sweep.w0_list = {6e-6, 30e-6, 51e-6, 102e-6};
    run_sweep(cfg, dir.sub("s1"));
    run_sweep(cfg, dir.sub("s2"));
    for (const char* name : {"sweep_records.csv", "complementarity_circle.csv",
                             "sweep_summary.json"}) {
        CHECK(file_bytes(dir.sub("s1") + "/" + name) == file_bytes(dir.sub("s2") + "/" + name));
    }
}

TEST_CASE("sweep demands at least four waists spanning all three regimes") {
    TempDir dir;
    ExperimentConfig cfg = bench_config();
    cfg.sweep.w0_list = {6e-6, 30e-6};
    CHECK_THROWS_AS(run_sweep(cfg, dir.sub("short")), ConfigError);
    cfg.sweep.w0_list = {6e-6, 12e-6, 30e-6, 51e-6}; // N tops out at 17
    CHECK_THROWS_AS(run_sweep(cfg, dir.sub("narrow")), ConfigError);
}

TEST_CASE("Monte Carlo sweep route produces the same orderings as the noiseless route") {
    TempDir dir;
    ExperimentConfig cfg = bench_config();
    cfg.grids.det_n = 128;
    cfg.sweep.w0_list = {6e-6, 30e-6, 51e-6, 102e-6};
    cfg.sweep.monte_carlo = true;
    cfg.acquisition.frames = 8000;
    cfg.acquisition.nx = 100;
    cfg.acquisition.ny = 16;
    cfg.acquisition.mean_pairs_per_frame = 6.0;
    cfg.acquisition.background_rate_per_pixel = 0.002;
    const auto records = run_sweep(cfg, dir.sub("mc"));
    REQUIRE(records.size() == 4);
    CHECK(records[0].v_m > 0.8);
    CHECK(records[3].v_m < 0.3);
    CHECK(records[0].v_m > records[1].v_m);
    CHECK(records[1].v_m > records[2].v_m);
    CHECK(records[2].v_m > records[3].v_m);
    CHECK(records[1].v_12 < records[2].v_12);
    CHECK(records[2].v_12 < records[3].v_12);
}

} // TEST_SUITE
