#ifndef BIPHOTON_ESTIMATOR_HPP
#define BIPHOTON_ESTIMATOR_HPP

// Coincidence estimation from photon-counting frames.
//
// The mean-subtracted pair distribution
//   G_ijkl = <c_ij c_kl> - <c_ij><c_kl>
// (ensemble average over frames) removes accidental coincidences and keeps
// the genuine pair correlations. The 4D object is never materialized at
// full frame size; the y-summed reductions follow from linearity:
//   G_ik    = cov(s_i, s_k)            with s_i = sum_j c_ij
//   rho(x_i)  = sum_j var(c_ij)          (marginal, one-photon fringes)
//   Corr(X) = sum_i cov(s_i, s_{i-X})  (anti-diagonal, two-photon fringes)
//   Corr+(S)= sum_i cov(s_i, s_{S-i})  (diagonal, paired-passage fringes)
// so a single pass accumulating s, s s^T and per-pixel first/second moments
// is enough. Averages divide by the frame count (population convention).

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace biphoton {

enum class ProfileKind { marginal, correlation, correlation_paired, intensity };

struct FringeProfile {
    std::vector<double> abscissa; // meters, strictly increasing
    std::vector<double> values;
    ProfileKind kind = ProfileKind::marginal;
};

class JpdAccumulator {
public:
    JpdAccumulator(int nx, int ny);

    // counts laid out row-major [y][x], length ny*nx.
    void add_frame(std::span<const uint16_t> counts);
    void merge(const JpdAccumulator& other);

    long frames_seen() const { return frames_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

    Eigen::MatrixXd jpd_2d() const;                      // G_ik, nx x nx
    FringeProfile marginal(double pixel_pitch) const;    // variance marginal
    FringeProfile correlation(double pixel_pitch) const; // anti-diagonal lags
    FringeProfile correlation_paired(double pixel_pitch) const; // diagonal lags
    FringeProfile intensity(double pixel_pitch) const;   // plain mean counts

private:
    void require_frames(const char* what) const;

    int nx_;
    int ny_;
    long frames_ = 0;
    Eigen::VectorXd sum_s_;    // per-column x sums
    Eigen::MatrixXd sum_ss_;   // outer products of x sums
    Eigen::VectorXd sum_c_;    // per-pixel counts, [y*nx + x]
    Eigen::VectorXd sum_cc_;   // per-pixel squared counts
    Eigen::VectorXd frame_s_;  // scratch
};

struct FrameStack; // detector_sim.hpp

struct PixelRoi {
    int x0 = 0;
    int x_count = 0;
    int y0 = 0;
    int y_count = 0;
};

// Full 4D mean-subtracted distribution on a small region of interest.
// Index order (i, j, k, l) = (x, y, x', y') relative to the ROI.
class Jpd4D {
public:
    Jpd4D(PixelRoi roi, std::vector<double> values);

    const PixelRoi& roi() const { return roi_; }
    double at(int i, int j, int k, int l) const;

    // Exact reductions, for cross-checking the streaming estimators.
    Eigen::MatrixXd reduce_2d() const;
    std::vector<double> reduce_marginal() const;
    std::vector<double> reduce_correlation() const;
    std::vector<double> reduce_correlation_paired() const;

private:
    PixelRoi roi_;
    std::vector<double> g_;
};

// Brute-force 4D estimate; the ROI is limited to 64*64 = 4096 pixels.
// Throws ValidationError above that (use the streaming reductions instead).
Jpd4D jpd_full(const FrameStack& frames, const PixelRoi& roi);

// Streaming estimators over a whole stack.
Eigen::MatrixXd jpd_2d(const FrameStack& frames);
FringeProfile marginal_profile(const FrameStack& frames);
FringeProfile correlation_profile(const FrameStack& frames);
FringeProfile correlation_paired_profile(const FrameStack& frames);

JpdAccumulator accumulate(const FrameStack& frames);

// Noiseless reductions of a ground-truth JPD (same abscissa conventions).
FringeProfile marginal_from_jpd(const Eigen::MatrixXd& jpd, double spacing);
FringeProfile correlation_from_jpd(const Eigen::MatrixXd& jpd, double spacing);
FringeProfile correlation_paired_from_jpd(const Eigen::MatrixXd& jpd, double spacing);

} // namespace biphoton

#endif
