#ifndef BIPHOTON_PROPAGATION_HPP
#define BIPHOTON_PROPAGATION_HPP

// Fourier-optics train of the double-slit experiment.
//
// Lens f2 images the crystal's momentum space onto the slit plane: the
// field at slit position u is Psi(q) with q = 2 pi u / (f2 lambda). After
// the aperture, lens f maps the slit plane to the detector through the
// scaled Fourier kernel exp(-2 pi i u X / (f lambda)). The kernel carries
// a 1/sqrt(f lambda) factor per axis so a transform between conjugate
// grids is unitary in the grid measure (Parseval holds to rounding).
//
// Intensity scales for slits at +/-d with opening a follow directly:
// fringe period f lambda / (2 d), diffraction envelope zero f lambda / a.

#include "biphoton/biphoton_state.hpp"
#include "biphoton/field.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/slits.hpp"

namespace biphoton {

struct OpticalTrain {
    double f2 = 0.10;                   // crystal -> slit-plane lens
    double f = 0.05;                    // slit-plane -> detector lens
    double signal_wavelength = 810e-9;  // band-pass filter center

    double focal_times_lambda() const { return f * signal_wavelength; }
    // Slit-plane position per unit transverse momentum.
    double momentum_to_slit_scale() const;
    void validate() const;
};

// Samples the momentum wavefunction on the slit plane and normalizes on the
// grid. Throws ValidationError if the grid clips either slit or if the
// probability transmitted by the aperture is not grid-complete (more than
// 1e-3 of the transmitted mass would fall outside).
Field2D momentum_to_slit_plane(const BiphotonState& state, const Grid1D& grid,
                               const OpticalTrain& train);

// Multiplies by the aperture on both photon coordinates. Not renormalized:
// the lost probability is the blocked light.
Field2D apply_double_slit(const Field2D& field, const SlitParams& slits);

// Fourier transform of the slit-plane field onto the detector grid,
// renormalized to unit probability on that grid (post-selection on both
// photons arriving in the observed window). Throws ValidationError when the
// detector grid undersamples the interference fringes.
Field2D propagate_to_detector(const Field2D& field, const OpticalTrain& train,
                              const Grid1D& detector_grid, const SlitParams& slits);

// |psi|^2 on the detector grid, normalized to unit sum.
Jpd2D detector_jpd(const Field2D& field);

// Independent route to the detector field: the closed-form transform of the
// aperture pair, cos(2 pi d X / (f lambda)) * sinc(pi a X / (f lambda)),
// convolved with the closed-form transform of the unapertured state, the
// position wavefunction at (f2/f)-scaled arguments. Evaluated by direct
// quadrature on a fine internal grid. Returns the maximum absolute
// difference between the two routes' unit-sum JPDs, relative to the peak.
double convolution_crosscheck(const BiphotonState& state, const SlitParams& slits,
                              const OpticalTrain& train, const Grid1D& detector_grid);

// Core transform shared by the routes: out(X_k) = sum_j in_j
// exp(-2 pi i u_j X_k / scale) du / sqrt(scale) applied to both axes.
Eigen::MatrixXcd scaled_fourier_2d(const Eigen::MatrixXcd& in, const Grid1D& in_grid,
                                   const Grid1D& out_grid, double scale);

} // namespace biphoton

#endif
