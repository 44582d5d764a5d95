#include <doctest.h>

#include <cmath>
#include <random>

#include "biphoton/detector_sim.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/estimator.hpp"
#include "biphoton/rng.hpp"

using namespace biphoton;

namespace {

FrameStack constant_stack(int frames, int nx, int ny, uint16_t value) {
    FrameStack stack;
    stack.acquisition.frames = frames;
    stack.acquisition.nx = nx;
    stack.acquisition.ny = ny;
    stack.counts.assign(static_cast<size_t>(frames) * nx * ny, value);
    return stack;
}

FrameStack poisson_stack(int frames, int nx, int ny, double rate, uint64_t seed) {
    FrameStack stack;
    stack.acquisition.frames = frames;
    stack.acquisition.nx = nx;
    stack.acquisition.ny = ny;
    stack.counts.resize(static_cast<size_t>(frames) * nx * ny);
    for (int f = 0; f < frames; ++f) {
        std::mt19937_64 rng(substream_seed(seed, static_cast<uint64_t>(f)));
        for (int p = 0; p < nx * ny; ++p)
            stack.counts[static_cast<size_t>(f) * nx * ny + p] =
                static_cast<uint16_t>(poisson_sample(rng, rate));
    }
    return stack;
}

FrameStack synthetic_stack(int frames, int nx, int ny, uint64_t seed) {
    Jpd2D jpd;
    jpd.axis = Grid1D::make(256, nx * 16e-6);
    jpd.p.resize(256, 256);
    for (int i = 0; i < 256; ++i)
        for (int j = 0; j < 256; ++j) {
            const double x1 = jpd.axis.point(i) / jpd.axis.extent;
            const double x2 = jpd.axis.point(j) / jpd.axis.extent;
            jpd.p(i, j) = std::exp(-6.0 * (x1 * x1 + x2 * x2)) *
                          (1.0 + 0.7 * std::cos(50.0 * (x1 - x2)));
        }
    jpd.normalize();

    AcquisitionParams params;
    params.frames = frames;
    params.nx = nx;
    params.ny = ny;
    params.mean_pairs_per_frame = 3.0;
    params.detection_efficiency = 0.7;
    params.background_rate_per_pixel = 0.01;
    params.y_envelope_sigma = 70e-6;
    params.rng_seed = seed;
    return synthesize_frames(jpd, params);
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

TEST_SUITE("estimator") {

TEST_CASE("constant frames have zero coincidence signal everywhere") {
    const FrameStack stack = constant_stack(100, 12, 6, 3);
    CHECK(jpd_2d(stack).cwiseAbs().maxCoeff() == 0.0);
    CHECK(max_abs(marginal_profile(stack).values) == 0.0);
    CHECK(max_abs(correlation_profile(stack).values) == 0.0);

    const Jpd4D full = jpd_full(stack, PixelRoi{0, 12, 0, 6});
    CHECK(max_abs(full.reduce_marginal()) == 0.0);
}

TEST_CASE("independent Poisson pixels: off-diagonal stays within 5 sigma of zero") {
    const int frames = 5000;
    const double rate = 2.0;
    const FrameStack stack = poisson_stack(frames, 8, 4, rate, 13);
    const Jpd4D full = jpd_full(stack, PixelRoi{0, 8, 0, 4});

    // Independent pixels: covariance estimate fluctuates with variance
    // roughly rate^2 / frames off the diagonal.
    const double sigma = std::sqrt(rate * rate / frames);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 8; ++k)
                for (int l = 0; l < 4; ++l) {
                    if (i == k && j == l) continue;
                    CHECK(std::abs(full.at(i, j, k, l)) < 5.0 * sigma);
                }

    // Diagonal entries are the per-pixel sample variances: close to the rate.
    double mean_var = 0.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 4; ++j) mean_var += full.at(i, j, i, j);
    mean_var /= 32.0;
    CHECK(mean_var == doctest::Approx(rate).epsilon(0.05));
}

TEST_CASE("diagonal of the 4D estimate is the per-pixel sample variance") {
    const FrameStack stack = synthetic_stack(500, 10, 4, 3);
    const Jpd4D full = jpd_full(stack, PixelRoi{0, 10, 0, 4});
    const double m = stack.acquisition.frames;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 4; ++j) {
            double sum = 0.0, sum2 = 0.0;
            for (int f = 0; f < stack.acquisition.frames; ++f) {
                const double c = stack.frame(f)[static_cast<size_t>(j) * 10 + i];
                sum += c;
                sum2 += c * c;
            }
            const double variance = sum2 / m - (sum / m) * (sum / m);
            CHECK(full.at(i, j, i, j) == doctest::Approx(variance).epsilon(1e-12));
        }
}

TEST_CASE("streaming reductions equal the brute-force 4D reductions exactly") {
    const FrameStack stack = synthetic_stack(1000, 32, 8, 21);
    const Jpd4D full = jpd_full(stack, PixelRoi{0, 32, 0, 8});
    const JpdAccumulator acc = accumulate(stack);
    const double pitch = stack.acquisition.pixel_pitch;

    const Eigen::MatrixXd g_stream = acc.jpd_2d();
    const Eigen::MatrixXd g_brute = full.reduce_2d();
    const double scale = g_brute.cwiseAbs().maxCoeff();
    CHECK((g_stream - g_brute).cwiseAbs().maxCoeff() < 1e-10 * scale);
    CHECK((g_stream - g_stream.transpose()).cwiseAbs().maxCoeff() < 1e-14 * scale);

    const auto rho_brute = full.reduce_marginal();
    const auto rho_stream = acc.marginal(pitch).values;
    for (size_t i = 0; i < rho_brute.size(); ++i)
        CHECK(rho_stream[i] == doctest::Approx(rho_brute[i]).epsilon(1e-10));

    const auto corr_brute = full.reduce_correlation();
    const auto corr_stream = acc.correlation(pitch).values;
    REQUIRE(corr_stream.size() == corr_brute.size());
    for (size_t i = 0; i < corr_brute.size(); ++i)
        CHECK(corr_stream[i] ==
              doctest::Approx(corr_brute[i]).epsilon(1e-10).scale(std::abs(corr_brute[i]) + 1e-9));

    const auto paired_brute = full.reduce_correlation_paired();
    const auto paired_stream = acc.correlation_paired(pitch).values;
    for (size_t i = 0; i < paired_brute.size(); ++i)
        CHECK(paired_stream[i] ==
              doctest::Approx(paired_brute[i]).epsilon(1e-10).scale(std::abs(paired_brute[i]) + 1e-9));
}

TEST_CASE("oversized ROI is pushed to the streaming estimators") {
    const FrameStack stack = synthetic_stack(10, 120, 40, 2);
    CHECK_THROWS_AS(jpd_full(stack, PixelRoi{0, 120, 0, 40}), ValidationError);
    CHECK_THROWS_AS(jpd_full(stack, PixelRoi{0, 200, 0, 1}), ConfigError); // outside the frame
}

TEST_CASE("constant per-pixel offsets cancel exactly in all estimators") {
    const FrameStack stack = synthetic_stack(2000, 16, 8, 5);
    FrameStack offset = stack;
    for (auto& c : offset.counts) c = static_cast<uint16_t>(c + 7);

    const JpdAccumulator acc_a = accumulate(stack);
    const JpdAccumulator acc_b = accumulate(offset);
    const double pitch = stack.acquisition.pixel_pitch;

    const double scale = acc_a.jpd_2d().cwiseAbs().maxCoeff();
    CHECK((acc_a.jpd_2d() - acc_b.jpd_2d()).cwiseAbs().maxCoeff() < 1e-10 * scale);
    for (size_t i = 0; i < acc_a.marginal(pitch).values.size(); ++i)
        CHECK(acc_a.marginal(pitch).values[i] ==
              doctest::Approx(acc_b.marginal(pitch).values[i]).epsilon(1e-10));
    for (size_t i = 0; i < acc_a.correlation(pitch).values.size(); ++i)
        CHECK(acc_a.correlation(pitch).values[i] ==
              doctest::Approx(acc_b.correlation(pitch).values[i])
                  .epsilon(1e-10)
                  .scale(scale));
}

TEST_CASE("marginal of pure Poisson frames reproduces the rate (variance = mean)") {
    const int frames = 8000;
    const double rate = 1.5;
    const int nx = 10, ny = 6;
    const FrameStack stack = poisson_stack(frames, nx, ny, rate, 17);
    const FringeProfile rho = marginal_profile(stack);
    // Each column sums ny independent Poisson variances.
    const double expected = ny * rate;
    const double sigma = rate * std::sqrt(2.0 * ny / static_cast<double>(frames));
    for (double v : rho.values) CHECK(std::abs(v - expected) < 5.0 * sigma);
}

TEST_CASE("accumulator merge equals single-pass accumulation") {
    const FrameStack stack = synthetic_stack(900, 20, 8, 43);
    const JpdAccumulator whole = accumulate(stack);

    JpdAccumulator parts(20, 8);
    JpdAccumulator mid(20, 8);
    JpdAccumulator tail(20, 8);
    for (int f = 0; f < 300; ++f) parts.add_frame(stack.frame(f));
    for (int f = 300; f < 600; ++f) mid.add_frame(stack.frame(f));
    for (int f = 600; f < 900; ++f) tail.add_frame(stack.frame(f));
    parts.merge(mid);
    parts.merge(tail);

    CHECK(parts.frames_seen() == whole.frames_seen());
    const double scale = whole.jpd_2d().cwiseAbs().maxCoeff();
    CHECK((parts.jpd_2d() - whole.jpd_2d()).cwiseAbs().maxCoeff() < 1e-10 * scale);
}

TEST_CASE("correlation noise scales as one over the square root of the frame count") {
    // Uncorrelated Poisson input: any nonzero off-diagonal lag signal is
    // pure estimator noise, which must shrink like 1/sqrt(M).
    const int nx = 16, ny = 6;
    const auto noise_level = [&](int frames, uint64_t seed) {
        const FrameStack stack = poisson_stack(frames, nx, ny, 2.0, seed);
        const FringeProfile corr = correlation_profile(stack);
        double sum2 = 0.0;
        int n = 0;
        for (size_t i = 0; i < corr.values.size(); ++i) {
            const long lag = std::lround(corr.abscissa[i] / stack.acquisition.pixel_pitch);
            if (lag == 0) continue;
            sum2 += corr.values[i] * corr.values[i];
            ++n;
        }
        return std::sqrt(sum2 / n);
    };
    const double coarse = noise_level(2000, 101);
    const double fine = noise_level(8000, 102);
    const double ratio = coarse / fine;
    CHECK(ratio > 2.0 / 1.5);
    CHECK(ratio < 2.0 * 1.5);
}

TEST_CASE("noiseless JPD reductions share conventions with the frame estimators") {
    Eigen::MatrixXd jpd(4, 4);
    jpd << 0.10, 0.02, 0.01, 0.00, //
        0.02, 0.20, 0.03, 0.01,    //
        0.01, 0.03, 0.30, 0.02,    //
        0.00, 0.01, 0.02, 0.22;
    const double spacing = 1e-5;

    const FringeProfile marginal = marginal_from_jpd(jpd, spacing);
    CHECK(marginal.values[1] == doctest::Approx(0.26));
    CHECK(marginal.abscissa[0] == doctest::Approx(-1.5e-5));

    const FringeProfile corr = correlation_from_jpd(jpd, spacing);
    REQUIRE(corr.values.size() == 7);
    // Lag zero sums the diagonal; lag +1 sums J(i, i-1).
    CHECK(corr.values[3] == doctest::Approx(0.82));
    CHECK(corr.values[4] == doctest::Approx(0.02 + 0.03 + 0.02));
    CHECK(corr.abscissa[4] == doctest::Approx(spacing));

    const FringeProfile paired = correlation_paired_from_jpd(jpd, spacing);
    REQUIRE(paired.values.size() == 7);
    // Sum-lag center (x1 + x2 = 0) sums the anti-diagonal.
    CHECK(paired.values[3] == doctest::Approx(0.00 + 0.03 + 0.03 + 0.00));
}

} // TEST_SUITE
