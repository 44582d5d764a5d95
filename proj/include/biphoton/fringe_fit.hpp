#ifndef BIPHOTON_FRINGE_FIT_HPP
#define BIPHOTON_FRINGE_FIT_HPP

// Interference-profile model and least-squares fit:
//
//   f(t) = A sinc^2(pi a t / (f lambda)) [1 + V cos(2 pi d t / (f lambda))] + c
//
// with sinc(u) = sin(u)/u. The sinc^2 is the single-opening diffraction
// envelope; the cosine carries the two-slit interference, period
// f lambda / d for separation d (center-to-center distance of the two
// openings). Free parameters are (A, V, c); the geometry is fixed.
// There is no phase parameter, so profiles must be centered (t = 0 at the
// envelope's symmetry point) before fitting.

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "biphoton/estimator.hpp"

namespace biphoton {

struct FringeGeometry {
    double opening_a = 150e-6;
    double separation_d = 500e-6; // full slit separation (2x half separation)
    double focal_f = 0.05;
    double wavelength = 810e-9;

    double fringe_period() const { return focal_f * wavelength / separation_d; }
    double envelope_zero() const { return focal_f * wavelength / opening_a; }
    void validate() const;
};

struct FringeModelParams {
    double amplitude = 1.0;
    double visibility = 0.5;
    double offset = 0.0;
    FringeGeometry geometry;
};

double fringe_model(double t, const FringeModelParams& p);

struct FitOptions {
    double cost_rel_tol = 1e-10;
    double gradient_tol = 1e-12;
    int max_iterations = 200;
    // When set, replaces the heuristic (A0, V0, c0) starting point.
    std::optional<std::array<double, 3>> initial_guess;
};

struct FitResult {
    FringeModelParams params;     // visibility reported in [0, 1]
    double raw_visibility = 0.0;  // optimizer's value before final clamping
    bool visibility_clamped = false;
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero(); // order (A, V, c)
    double rms_residual = 0.0;
    bool converged = false;
    int iterations = 0;

    double sigma(int i) const { return std::sqrt(std::max(0.0, covariance(i, i))); }
    double sigma_amplitude() const { return sigma(0); }
    double sigma_visibility() const { return sigma(1); }
    double sigma_offset() const { return sigma(2); }
};

// Damped Gauss-Newton (Levenberg-Marquardt) fit of (A, V, c) to a profile.
// Starting point: c0 = min, A0 = max - min, V0 from the ratio of the
// profile's Fourier component at the fringe frequency to its DC component.
// V is constrained to [0, 1.05] during iteration and clamped to [0, 1] in
// the report, with a flag when the raw optimum exceeded 1.
// Covariance is rms^2 (J^T J)^{-1}.
FitResult fit_fringes(const FringeProfile& profile, const FringeGeometry& geometry,
                      const FitOptions& options = {});

struct ComplementarityResult {
    double value = 0.0; // V_m^2 + V_12^2
    double sigma = 0.0; // 1-sigma propagated from the fit covariances
};

// V_m^2 + V_12^2 from two visibility estimates with uncertainties.
ComplementarityResult complementarity(double v_m, double sigma_m, double v_12,
                                      double sigma_12);

// Convenience for the case where the correlation fit's visibility is taken
// as V_12 directly (valid when the paired component is negligible).
// Throws ValidationError if either fit did not converge.
ComplementarityResult complementarity(const FitResult& fit_marginal,
                                      const FitResult& fit_correlation);

} // namespace biphoton

#endif
