#ifndef BIPHOTON_ANALYSIS_HPP
#define BIPHOTON_ANALYSIS_HPP

// Model-free measurements on fringe profiles, used to verify the pipeline's
// geometric scales and to center profiles before fitting.

#include <Eigen/Dense>

#include "biphoton/estimator.hpp"

namespace biphoton {

// Fringe period as the fundamental line of the power spectrum (the Fourier
// transform of the profile's autocorrelation). The spectral line inherits
// the envelope's symmetric lineshape, so its parabola-refined peak is an
// unbiased frequency estimate, unlike the raw autocorrelation peaks which
// the decaying envelope drags inward. Throws ValidationError when the
// spectrum has no interior line (no fringes).
double fringe_period_from_profile(const FringeProfile& profile);

// Location (t > 0) of the first zero of the diffraction envelope. Averaging
// over one fringe period cancels the oscillation but displaces the minimum
// by O(width^2) through the envelope's cubic asymmetry, so the minimum is
// located for two box widths and Richardson-extrapolated to zero width.
double envelope_zero_from_profile(const FringeProfile& profile, double fringe_period);

// Shifts the abscissa so the symmetry center sits at t = 0 (the fit model
// has no phase parameter and peaks at t = 0). Fringe troughs are also
// mirror points, so among competitive mirror centers the one on the
// envelope crest is chosen.
FringeProfile center_profile(const FringeProfile& profile);

// sigma_2 / sigma_1 of a matrix; zero for numerically rank-one data.
double rank1_residual(const Eigen::MatrixXd& m);

// Effective Schmidt number 1 / sum(lambda_k^2) of a discretized two-party
// amplitude, with lambda_k the normalized squared singular values.
double effective_schmidt_number(const Eigen::MatrixXd& amplitude);

// Root-mean-square width  sqrt(<t^2> - <t>^2)  of |profile|^2.
double rms_width(const std::vector<double>& abscissa, const std::vector<double>& values);

} // namespace biphoton

#endif
