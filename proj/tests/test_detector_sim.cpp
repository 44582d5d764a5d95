#include <doctest.h>

#include <cmath>
#include <numeric>

#include "biphoton/detector_sim.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/estimator.hpp"

using namespace biphoton;

namespace {

Jpd2D uniform_jpd(int n, double extent) {
    Jpd2D jpd;
    jpd.axis = Grid1D::make(n, extent);
    jpd.p = Eigen::MatrixXd::Constant(n, n, 1.0);
    jpd.normalize();
    return jpd;
}

// Two-source interference JPD stand-in: smooth, asymmetric in magnitude but
// exchange-symmetric, cheap to build.
Jpd2D fringed_jpd(int n, double extent) {
    Jpd2D jpd;
    jpd.axis = Grid1D::make(n, extent);
    jpd.p.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x1 = jpd.axis.point(i) / extent;
            const double x2 = jpd.axis.point(j) / extent;
            jpd.p(i, j) = std::exp(-8.0 * (x1 * x1 + x2 * x2)) *
                          (1.0 + 0.8 * std::cos(40.0 * (x1 - x2)));
        }
    jpd.normalize();
    return jpd;
}

AcquisitionParams small_params() {
    AcquisitionParams p;
    p.frames = 400;
    p.nx = 16;
    p.ny = 8;
    p.pixel_pitch = 16e-6;
    p.mean_pairs_per_frame = 3.0;
    p.detection_efficiency = 0.8;
    p.background_rate_per_pixel = 0.02;
    p.y_envelope_sigma = 60e-6;
    p.rng_seed = 99;
    return p;
}

} // namespace

TEST_SUITE("detector_sim") {

TEST_CASE("pixelation: uniform stays uniform and the total is preserved") {
    // Grid spacing 4 um divides the 16 um pitch exactly, so every pixel
    // collects the same number of cells.
    const Jpd2D jpd = uniform_jpd(512, 2.048e-3);
    const PixelPairDistribution dist = pixelate_jpd(jpd, 100, 16e-6);
    CHECK(dist.p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    const double expected = 1.0 / (100.0 * 100.0);
    CHECK(dist.p.minCoeff() == doctest::Approx(expected).epsilon(1e-9).scale(0.0));
    CHECK(dist.p.maxCoeff() == doctest::Approx(expected).epsilon(1e-9).scale(0.0));

    // 81 um fringes span just over 5 pixels of 16 um.
    CHECK(81e-6 / 16e-6 == doctest::Approx(5.0625));
}

TEST_CASE("pixelation rejects pixel arrays larger than the grid") {
    const Jpd2D jpd = uniform_jpd(128, 1e-3);
    CHECK_THROWS_AS(pixelate_jpd(jpd, 80, 16e-6), ValidationError); // 1.28 mm > 1 mm
}

TEST_CASE("pair sampling: point mass and empirical convergence") {
    PixelPairDistribution point;
    point.nx = 8;
    point.pixel_pitch = 16e-6;
    point.p = Eigen::MatrixXd::Zero(8, 8);
    point.p(3, 5) = 1.0;
    std::mt19937_64 rng(1);
    for (const auto& [a, b] : sample_pairs(point, 1000, rng)) {
        CHECK(a == 3);
        CHECK(b == 5);
    }

    // Chi-square against a non-trivial distribution on 8x8 = 64 outcomes.
    PixelPairDistribution dist;
    dist.nx = 8;
    dist.pixel_pitch = 16e-6;
    dist.p.resize(8, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) dist.p(i, j) = 1.0 + 0.5 * std::sin(i * 1.1 + j * 0.7);
    dist.p /= dist.p.sum();

    const int samples = 1000000;
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(8, 8);
    std::mt19937_64 rng2(2);
    for (const auto& [a, b] : sample_pairs(dist, samples, rng2)) counts(a, b) += 1.0;

    double chi2 = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            const double expected = samples * dist.p(i, j);
            chi2 += std::pow(counts(i, j) - expected, 2) / expected;
        }
    // 63 degrees of freedom: mean 63, sd ~11.2; 5 sigma gates flukes.
    CHECK(chi2 > 63.0 - 5.0 * 11.3);
    CHECK(chi2 < 63.0 + 5.0 * 11.3);
}

TEST_CASE("exchange-symmetric distribution samples both orders equally") {
    PixelPairDistribution dist;
    dist.nx = 4;
    dist.pixel_pitch = 16e-6;
    dist.p.resize(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) dist.p(i, j) = 1.0 + std::cos(1.3 * (i + j)) * 0.5;
    dist.p = ((dist.p + dist.p.transpose()) / 2.0).eval();
    dist.p /= dist.p.sum();

    std::mt19937_64 rng(5);
    const int samples = 400000;
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(4, 4);
    for (const auto& [a, b] : sample_pairs(dist, samples, rng)) counts(a, b) += 1.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            const double n1 = counts(i, j), n2 = counts(j, i);
            const double sigma = std::sqrt(n1 + n2);
            CHECK(std::abs(n1 - n2) < 5.0 * sigma);
        }
}

TEST_CASE("zero efficiency and zero background give an all-zero stack") {
    AcquisitionParams params = small_params();
    params.detection_efficiency = 0.0;
    params.background_rate_per_pixel = 0.0;
    const FrameStack stack = synthesize_frames(fringed_jpd(256, 2e-3), params);
    const uint64_t total = std::accumulate(stack.counts.begin(), stack.counts.end(), uint64_t{0});
    CHECK(total == 0);
}

TEST_CASE("mean counts per frame match the Poisson budget") {
    AcquisitionParams params = small_params();
    params.frames = 4000;
    const FrameStack stack = synthesize_frames(fringed_jpd(256, 2e-3), params);
    const uint64_t total = std::accumulate(stack.counts.begin(), stack.counts.end(), uint64_t{0});

    const double per_frame_signal =
        2.0 * params.mean_pairs_per_frame * params.detection_efficiency;
    const double per_frame_background =
        params.background_rate_per_pixel * params.nx * params.ny;
    const double expected = params.frames * (per_frame_signal + per_frame_background);
    // Counts are a sum of Poissons: variance equals the mean.
    const double sigma = std::sqrt(expected);
    CHECK(std::abs(static_cast<double>(total) - expected) < 3.0 * sigma);
}

TEST_CASE("determinism: same seed, same bits; including the streaming path") {
    AcquisitionParams params = small_params();
    const Jpd2D jpd = fringed_jpd(256, 2e-3);
    const FrameStack a = synthesize_frames(jpd, params);
    const FrameStack b = synthesize_frames(jpd, params);
    CHECK(a.counts == b.counts);

    const PixelPairDistribution dist = pixelate_jpd(jpd, params.nx, params.pixel_pitch);
    const FrameSynthesizer synth(dist, params);
    std::vector<uint16_t> frame(static_cast<size_t>(params.nx) * params.ny);
    synth.synthesize(7, frame);
    CHECK(std::equal(frame.begin(), frame.end(), a.frame(7).begin()));

    AcquisitionParams reseeded = params;
    reseeded.rng_seed += 1;
    const FrameStack c = synthesize_frames(jpd, reseeded);
    CHECK(a.counts != c.counts);
}

TEST_CASE("background stream is independent of the pair stream") {
    AcquisitionParams with_bg = small_params();
    AcquisitionParams no_bg = with_bg;
    no_bg.background_rate_per_pixel = 0.0;
    const Jpd2D jpd = fringed_jpd(256, 2e-3);
    const FrameStack stack_bg = synthesize_frames(jpd, with_bg);
    const FrameStack stack_clean = synthesize_frames(jpd, no_bg);

    // Background only adds counts: the difference is everywhere >= 0.
    for (size_t i = 0; i < stack_bg.counts.size(); ++i)
        CHECK(stack_bg.counts[i] >= stack_clean.counts[i]);
}

TEST_CASE("estimated JPD recovers the pixelated ground truth at unit efficiency") {
    AcquisitionParams params;
    params.frames = 20000;
    params.nx = 24;
    params.ny = 8;
    params.mean_pairs_per_frame = 1.0;
    params.detection_efficiency = 1.0;
    params.background_rate_per_pixel = 0.0;
    params.y_envelope_sigma = 60e-6;
    params.rng_seed = 7;
    const Jpd2D jpd = fringed_jpd(256, params.nx * params.pixel_pitch);
    const PixelPairDistribution dist = pixelate_jpd(jpd, params.nx, params.pixel_pitch);
    const FrameStack stack = synthesize_frames(dist, params);

    // Off-diagonal coincidences scale as mu * (P + P^T); normalize both
    // sides with the diagonal excluded (it carries single-photon shot noise).
    Eigen::MatrixXd estimate = jpd_2d(stack);
    Eigen::MatrixXd truth = (dist.p + dist.p.transpose()) / 2.0;
    estimate.diagonal().setZero();
    truth.diagonal().setZero();
    estimate /= estimate.sum();
    truth /= truth.sum();

    const double l1 = (estimate - truth).cwiseAbs().sum();
    CHECK(l1 < 5.0 * params.nx * std::sqrt(1.0 / params.frames));
    CHECK(l1 < 0.35); // actual scale for this configuration, not just the loose bound
}

TEST_CASE("coincidence signal scales as efficiency squared") {
    AcquisitionParams params;
    params.frames = 30000;
    params.nx = 16;
    params.ny = 8;
    params.mean_pairs_per_frame = 2.0;
    params.background_rate_per_pixel = 0.0;
    params.y_envelope_sigma = 60e-6;
    const Jpd2D jpd = fringed_jpd(256, params.nx * params.pixel_pitch);

    params.detection_efficiency = 1.0;
    params.rng_seed = 31;
    Eigen::MatrixXd g_full = jpd_2d(synthesize_frames(jpd, params));
    params.detection_efficiency = 0.5;
    params.rng_seed = 32;
    Eigen::MatrixXd g_half = jpd_2d(synthesize_frames(jpd, params));

    g_full.diagonal().setZero();
    g_half.diagonal().setZero();
    const double ratio = g_half.sum() / g_full.sum();
    // eta^2 = 0.25; the total off-diagonal mass concentrates well at this
    // frame count, so a 15% window is already a sharp test.
    CHECK(ratio == doctest::Approx(0.25).epsilon(0.15));
}

TEST_CASE("uniform Poisson background leaves the coincidence estimate unchanged") {
    AcquisitionParams params;
    params.frames = 30000;
    params.nx = 16;
    params.ny = 8;
    params.mean_pairs_per_frame = 2.0;
    params.detection_efficiency = 0.7;
    params.y_envelope_sigma = 60e-6;
    params.rng_seed = 77;
    const Jpd2D jpd = fringed_jpd(256, params.nx * params.pixel_pitch);

    params.background_rate_per_pixel = 0.0;
    Eigen::MatrixXd g_clean = jpd_2d(synthesize_frames(jpd, params));
    params.background_rate_per_pixel = 0.05;
    Eigen::MatrixXd g_noisy = jpd_2d(synthesize_frames(jpd, params));

    // Identical pair placements (separate streams), so off-diagonal entries
    // agree within the background's own statistical wiggle: the covariance
    // estimator's per-entry sigma is sqrt(G_ii G_kk / M).
    const double sigma_entry = std::sqrt(g_noisy.diagonal().maxCoeff() *
                                         g_noisy.diagonal().maxCoeff() /
                                         static_cast<double>(params.frames));
    g_clean.diagonal().setZero();
    g_noisy.diagonal().setZero();
    CHECK((g_noisy - g_clean).cwiseAbs().maxCoeff() < 6.0 * sigma_entry);
}

TEST_CASE("acquisition validation messages carry the key path") {
    AcquisitionParams params = small_params();
    params.detection_efficiency = 1.5;
    CHECK_THROWS_WITH_AS(params.validate(), "acquisition.efficiency: must lie in [0, 1]",
                         ConfigError);
}

} // TEST_SUITE
