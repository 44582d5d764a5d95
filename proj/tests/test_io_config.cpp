#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "biphoton/config.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"

using namespace biphoton;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("biphoton_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_SUITE("io_config") {

TEST_CASE("BPF2 round trip preserves values and spacings") {
    TempDir dir;
    Eigen::MatrixXd m(3, 5);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j) m(i, j) = dist(rng);

    const std::string path = dir.file("matrix.bpf2");
    write_bpf2(path, m, 1.5e-6, 2.5e-6);
    const Bpf2Matrix back = read_bpf2(path);
    CHECK(back.spacing1 == 1.5e-6);
    CHECK(back.spacing2 == 2.5e-6);
    CHECK((back.values - m).cwiseAbs().maxCoeff() == 0.0);

    // Header starts with the magic bytes.
    const std::string raw = read_text_file(path);
    CHECK(raw.substr(0, 4) == "BPF2");
}

TEST_CASE("BPFS round trip: header fields, counts, streaming reader") {
    TempDir dir;
    FrameStack stack;
    stack.acquisition.frames = 7;
    stack.acquisition.nx = 5;
    stack.acquisition.ny = 3;
    stack.acquisition.pixel_pitch = 16e-6;
    stack.acquisition.rng_seed = 424242;
    stack.counts.resize(7 * 5 * 3);
    for (size_t i = 0; i < stack.counts.size(); ++i)
        stack.counts[i] = static_cast<uint16_t>((i * 7919) % 1000);

    const std::string path = dir.file("stack.bpfs");
    write_bpfs(path, stack);

    const FrameStack back = read_bpfs(path);
    CHECK(back.acquisition.frames == 7);
    CHECK(back.acquisition.nx == 5);
    CHECK(back.acquisition.ny == 3);
    CHECK(back.acquisition.pixel_pitch == 16e-6);
    CHECK(back.acquisition.rng_seed == 424242);
    CHECK(back.counts == stack.counts);

    BpfsReader reader(path);
    std::vector<uint16_t> frame(15);
    reader.read_frame(frame);
    CHECK(std::equal(frame.begin(), frame.end(), stack.frame(0).begin()));

    const std::string raw = read_text_file(path);
    CHECK(raw.substr(0, 4) == "BPFS");
}

TEST_CASE("BPFS rejects garbage and truncation") {
    TempDir dir;
    const std::string path = dir.file("bad.bpfs");
    write_text_file(path, "not a frame stack at all");
    CHECK_THROWS_AS(read_bpfs(path), IoError);
    CHECK_THROWS_AS(read_bpfs(dir.file("missing.bpfs")), IoError);
}

TEST_CASE("profile CSV round trip keeps kind, abscissa and values") {
    TempDir dir;
    FringeProfile prof;
    prof.kind = ProfileKind::correlation;
    for (int i = 0; i < 33; ++i) {
        prof.abscissa.push_back((i - 16) * 1.6e-5);
        prof.values.push_back(std::cos(i * 0.37) * 1.7e-3 + 2e-3);
    }
    const std::string path = dir.file("profile.csv");
    write_profile_csv(path, prof, {"tool: bpsim test", "config_hash: 0"});
    const FringeProfile back = read_profile_csv(path);
    CHECK(back.kind == ProfileKind::correlation);
    REQUIRE(back.values.size() == prof.values.size());
    for (size_t i = 0; i < prof.values.size(); ++i) {
        CHECK(back.abscissa[i] == prof.abscissa[i]);
        CHECK(back.values[i] == prof.values[i]);
    }
}

TEST_CASE("config parsing: defaults, overrides, lists, comments") {
    const ExperimentConfig cfg = parse_config_text(R"(
# sweep over three waists
pump.w0      = 30e-6
pump.w0_list = 6e-6, 30e-6, 102e-6, 120e-6
crystal.birth_zone_b = 3e-6   # pin the birth zone size
acquisition.seed = 12345
sweep.monte_carlo = false
)");
    CHECK(cfg.pump.waist_w0 == 30e-6);
    CHECK(cfg.birth_zone_b == 3e-6);
    CHECK(cfg.crystal_b() == 3e-6);
    CHECK(cfg.birth_zone_n() == doctest::Approx(10.0));
    REQUIRE(cfg.sweep.w0_list.size() == 4);
    CHECK(cfg.sweep.w0_list[2] == 102e-6);
    CHECK(cfg.acquisition.rng_seed == 12345);
    // Untouched keys keep their documented defaults.
    CHECK(cfg.optics.f2 == 0.10);
    CHECK(cfg.slits.separation() == doctest::Approx(500e-6));
    cfg.validate();
}

TEST_CASE("config errors carry the key path") {
    CHECK_THROWS_WITH_AS(parse_config_text("slits.opening_a = nonsense"),
                         "slits.opening_a: cannot parse number 'nonsense'", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("optics.focal = 0.05"),
                         "unknown config key 'optics.focal'", ConfigError);

    ExperimentConfig bad = parse_config_text("grids.slit_n = 1000");
    CHECK_THROWS_WITH_AS(bad.validate(), "grids.slit_n: must be a power of two >= 64",
                         ConfigError);

    ExperimentConfig narrow = parse_config_text("grids.slit_extent = 0.5e-3");
    CHECK_THROWS_AS(narrow.validate(), ConfigError);

    ExperimentConfig coarse = parse_config_text("grids.det_n = 64\ngrids.det_extent = 4e-3");
    CHECK_THROWS_AS(coarse.validate(), ConfigError);
}

TEST_CASE("config hash: stable under reformatting, sensitive to values") {
    const ExperimentConfig a = parse_config_text("pump.w0 = 30e-6");
    const ExperimentConfig b = parse_config_text("  pump.w0=3.0e-5  # same number");
    const ExperimentConfig c = parse_config_text("pump.w0 = 31e-6");
    CHECK(a.config_hash() == b.config_hash());
    CHECK(a.config_hash() != c.config_hash());

    // The canonical text parses back to the same hash.
    const ExperimentConfig reparsed = parse_config_text(a.canonical_text());
    CHECK(reparsed.config_hash() == a.config_hash());
}

TEST_CASE("default configuration validates") {
    ExperimentConfig cfg;
    cfg.validate();
    // Crystal-derived birth zone size for the stock 5 mm / 405 nm setup.
    CHECK(cfg.crystal_b() == doctest::Approx(1.03648244841e-5).epsilon(1e-10));
}

} // TEST_SUITE
