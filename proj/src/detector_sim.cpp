#include "biphoton/detector_sim.hpp"

#include <cmath>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

void AcquisitionParams::validate() const {
    if (frames < 1) throw ConfigError("acquisition.frames: must be >= 1");
    if (nx < 2) throw ConfigError("acquisition.nx: must be >= 2");
    if (ny < 1) throw ConfigError("acquisition.ny: must be >= 1");
    if (!(pixel_pitch > 0.0)) throw ConfigError("acquisition.pitch: must be > 0");
    if (!(mean_pairs_per_frame >= 0.0))
        throw ConfigError("acquisition.mu_pairs: must be >= 0");
    if (!(detection_efficiency >= 0.0 && detection_efficiency <= 1.0))
        throw ConfigError("acquisition.efficiency: must lie in [0, 1]");
    if (!(background_rate_per_pixel >= 0.0))
        throw ConfigError("acquisition.background: must be >= 0");
    if (!(y_envelope_sigma > 0.0)) throw ConfigError("acquisition.y_sigma: must be > 0");
}

PixelPairDistribution pixelate_jpd(const Jpd2D& jpd, int nx, double pixel_pitch) {
    if (nx < 2) throw ConfigError("pixelate_jpd: nx must be >= 2");
    if (!(pixel_pitch > 0.0)) throw ConfigError("pixelate_jpd: pixel pitch must be > 0");
    const double span = nx * pixel_pitch;
    if (span > jpd.axis.extent * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "pixelate_jpd: pixel array spans " << span << " m but the JPD grid covers only "
            << jpd.axis.extent << " m";
        throw ValidationError(msg.str());
    }

    PixelPairDistribution dist;
    dist.nx = nx;
    dist.pixel_pitch = pixel_pitch;
    dist.p = Eigen::MatrixXd::Zero(nx, nx);

    const int n = jpd.axis.n;
    std::vector<int> pixel_of(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        const double x = jpd.axis.point(i);
        const int p = static_cast<int>(std::floor(x / pixel_pitch + nx / 2.0));
        pixel_of[static_cast<size_t>(i)] = (p >= 0 && p < nx) ? p : -1;
    }
    for (int i = 0; i < n; ++i) {
        const int pi = pixel_of[static_cast<size_t>(i)];
        if (pi < 0) continue;
        for (int j = 0; j < n; ++j) {
            const int pj = pixel_of[static_cast<size_t>(j)];
            if (pj < 0) continue;
            dist.p(pi, pj) += jpd.p(i, j);
        }
    }
    const double total = dist.p.sum();
    if (!(total > 0.0))
        throw ValidationError("pixelate_jpd: no probability falls on the pixel array");
    dist.p /= total;
    return dist;
}

std::vector<std::pair<int, int>> sample_pairs(const PixelPairDistribution& dist, int count,
                                              std::mt19937_64& rng) {
    std::vector<double> weights(static_cast<size_t>(dist.nx) * static_cast<size_t>(dist.nx));
    for (int i = 0; i < dist.nx; ++i)
        for (int j = 0; j < dist.nx; ++j)
            weights[static_cast<size_t>(i) * static_cast<size_t>(dist.nx) +
                    static_cast<size_t>(j)] = dist.p(i, j);
    const AliasTable table(weights);

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<size_t>(count));
    for (int s = 0; s < count; ++s) {
        const int idx = table.sample(rng);
        pairs.emplace_back(idx / dist.nx, idx % dist.nx);
    }
    return pairs;
}

namespace {

std::vector<double> pair_weights(const PixelPairDistribution& dist) {
    std::vector<double> w(static_cast<size_t>(dist.nx) * static_cast<size_t>(dist.nx));
    for (int i = 0; i < dist.nx; ++i)
        for (int j = 0; j < dist.nx; ++j)
            w[static_cast<size_t>(i) * static_cast<size_t>(dist.nx) + static_cast<size_t>(j)] =
                dist.p(i, j);
    return w;
}

std::vector<double> y_weights(const AcquisitionParams& params) {
    std::vector<double> w(static_cast<size_t>(params.ny));
    for (int j = 0; j < params.ny; ++j) {
        const double y = (j - 0.5 * (params.ny - 1)) * params.pixel_pitch;
        w[static_cast<size_t>(j)] =
            std::exp(-y * y / (2.0 * params.y_envelope_sigma * params.y_envelope_sigma));
    }
    return w;
}

inline void bump(std::span<uint16_t> frame, size_t index) {
    if (frame[index] != UINT16_MAX) ++frame[index];
}

} // namespace

FrameSynthesizer::FrameSynthesizer(const PixelPairDistribution& dist,
                                   const AcquisitionParams& params)
    : params_(params), nx_(dist.nx), pair_table_(pair_weights(dist)), y_table_(y_weights(params)) {
    params_.validate();
    if (dist.nx != params.nx)
        throw ConfigError("FrameSynthesizer: distribution nx does not match acquisition nx");
}

void FrameSynthesizer::synthesize(int frame_index, std::span<uint16_t> out) const {
    const size_t npix = static_cast<size_t>(params_.nx) * static_cast<size_t>(params_.ny);
    if (out.size() != npix)
        throw ValidationError("FrameSynthesizer: output buffer has the wrong size");
    std::fill(out.begin(), out.end(), uint16_t{0});

    std::mt19937_64 rng_signal(substream_seed(params_.rng_seed, static_cast<uint64_t>(frame_index), 0));
    std::mt19937_64 rng_background(
        substream_seed(params_.rng_seed, static_cast<uint64_t>(frame_index), 1));

    const long pairs = poisson_sample(rng_signal, params_.mean_pairs_per_frame);
    for (long p = 0; p < pairs; ++p) {
        const int idx = pair_table_.sample(rng_signal);
        const int x1 = idx / nx_;
        const int x2 = idx % nx_;
        const int y1 = y_table_.sample(rng_signal);
        const int y2 = y_table_.sample(rng_signal);
        const bool keep1 = uniform_double(rng_signal) < params_.detection_efficiency;
        const bool keep2 = uniform_double(rng_signal) < params_.detection_efficiency;
        if (keep1)
            bump(out, static_cast<size_t>(y1) * static_cast<size_t>(nx_) + static_cast<size_t>(x1));
        if (keep2)
            bump(out, static_cast<size_t>(y2) * static_cast<size_t>(nx_) + static_cast<size_t>(x2));
    }

    if (params_.background_rate_per_pixel > 0.0) {
        const long hits =
            poisson_sample(rng_background, params_.background_rate_per_pixel * static_cast<double>(npix));
        for (long h = 0; h < hits; ++h) {
            size_t pix = static_cast<size_t>(uniform_double(rng_background) * static_cast<double>(npix));
            if (pix >= npix) pix = npix - 1;
            bump(out, pix);
        }
    }
}

FrameStack synthesize_frames(const PixelPairDistribution& dist, const AcquisitionParams& params) {
    const FrameSynthesizer synth(dist, params);
    const size_t frame_size = static_cast<size_t>(params.nx) * static_cast<size_t>(params.ny);
    const size_t total = frame_size * static_cast<size_t>(params.frames);
    if (total * sizeof(uint16_t) > (size_t{2} << 30))
        throw ValidationError(
            "synthesize_frames: stack exceeds 2 GiB; synthesize frame-by-frame instead");

    FrameStack stack;
    stack.acquisition = params;
    stack.counts.resize(total);
    for (int f = 0; f < params.frames; ++f)
        synth.synthesize(f, {stack.counts.data() + static_cast<size_t>(f) * frame_size, frame_size});
    return stack;
}

FrameStack synthesize_frames(const Jpd2D& jpd, const AcquisitionParams& params) {
    return synthesize_frames(pixelate_jpd(jpd, params.nx, params.pixel_pitch), params);
}

} // namespace biphoton
