#ifndef BIPHOTON_DETECTOR_SIM_HPP
#define BIPHOTON_DETECTOR_SIM_HPP

// Photon-counting camera forward model. Per frame: a Poisson number of
// pairs, each pair's x pixels drawn from the pixelated JPD, y pixels drawn
// independently per photon from a discretized Gaussian, each photon kept
// with the detection efficiency, plus uniform Poisson background per pixel.
// Pair photons landing on the same pixel count twice there.
//
// Synthesis is bit-deterministic: every frame draws from its own engines
// seeded by (seed, frame, stream), with separate signal and background
// streams, so frames are independent of processing order and background
// can be switched without perturbing the pair placements.

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "biphoton/field.hpp"
#include "biphoton/rng.hpp"

namespace biphoton {

struct AcquisitionParams {
    int frames = 100000;
    int nx = 120;
    int ny = 32;
    double pixel_pitch = 16e-6;
    double mean_pairs_per_frame = 5.0;
    double detection_efficiency = 0.5;
    double background_rate_per_pixel = 0.01;
    double y_envelope_sigma = 150e-6;
    uint64_t rng_seed = 1;

    void validate() const;
};

struct FrameStack {
    AcquisitionParams acquisition;
    std::vector<uint16_t> counts; // [frame][y][x], row-major

    size_t frame_size() const {
        return static_cast<size_t>(acquisition.ny) * static_cast<size_t>(acquisition.nx);
    }
    std::span<const uint16_t> frame(int f) const {
        return {counts.data() + static_cast<size_t>(f) * frame_size(), frame_size()};
    }
};

// Probability distribution over ordered x-pixel pairs, sum 1.
struct PixelPairDistribution {
    int nx = 0;
    double pixel_pitch = 0.0;
    Eigen::MatrixXd p;

    double pixel_center(int i) const { return (i - 0.5 * (nx - 1)) * pixel_pitch; }
};

// Bins a continuous JPD onto nx x nx pixels of the given pitch, centered on
// the optical axis, and renormalizes. Throws ValidationError if the pixel
// array extends beyond the JPD grid.
PixelPairDistribution pixelate_jpd(const Jpd2D& jpd, int nx, double pixel_pitch);

// i.i.d. ordered pixel pairs via an alias table over the nx^2 outcomes.
std::vector<std::pair<int, int>> sample_pairs(const PixelPairDistribution& dist, int count,
                                              std::mt19937_64& rng);

// Streaming synthesis: generates any frame of the stack independently.
class FrameSynthesizer {
public:
    FrameSynthesizer(const PixelPairDistribution& dist, const AcquisitionParams& params);

    // Fills out (ny*nx, row-major [y][x]) with frame f's counts.
    void synthesize(int frame_index, std::span<uint16_t> out) const;

    const AcquisitionParams& params() const { return params_; }

private:
    AcquisitionParams params_;
    int nx_;
    AliasTable pair_table_;
    AliasTable y_table_;
};

FrameStack synthesize_frames(const Jpd2D& jpd, const AcquisitionParams& params);
FrameStack synthesize_frames(const PixelPairDistribution& dist, const AcquisitionParams& params);

} // namespace biphoton

#endif
