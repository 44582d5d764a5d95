#include "biphoton/propagation.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

using Complex = std::complex<double>;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// Transform matrix between two position grids, kernel
// exp(-2 pi i u X / scale) du / sqrt(scale).
Eigen::MatrixXcd fourier_matrix(const Grid1D& in_grid, const Grid1D& out_grid, double scale) {
    const double du = in_grid.spacing();
    const double weight = du / std::sqrt(scale);
    Eigen::MatrixXcd f(out_grid.n, in_grid.n);
    for (int k = 0; k < out_grid.n; ++k) {
        const double xk = out_grid.point(k);
        for (int j = 0; j < in_grid.n; ++j) {
            const double phase = -2.0 * std::numbers::pi * in_grid.point(j) * xk / scale;
            f(k, j) = Complex(std::cos(phase), std::sin(phase)) * weight;
        }
    }
    return f;
}

} // namespace

double OpticalTrain::momentum_to_slit_scale() const {
    return f2 * signal_wavelength / (2.0 * std::numbers::pi);
}

void OpticalTrain::validate() const {
    if (!(f2 > 0.0)) throw ConfigError("optics: f2 must be > 0");
    if (!(f > 0.0)) throw ConfigError("optics: f must be > 0");
    if (!(signal_wavelength > 0.0)) throw ConfigError("optics: signal wavelength must be > 0");
}

Eigen::MatrixXcd scaled_fourier_2d(const Eigen::MatrixXcd& in, const Grid1D& in_grid,
                                   const Grid1D& out_grid, double scale) {
    const Eigen::MatrixXcd f = fourier_matrix(in_grid, out_grid, scale);
    return f * in * f.transpose();
}

Field2D momentum_to_slit_plane(const BiphotonState& state, const Grid1D& grid,
                               const OpticalTrain& train) {
    train.validate();
    const double q_per_u = 1.0 / train.momentum_to_slit_scale();

    // Anti-pairing correlation width at the slit plane; if the grid cannot
    // resolve it the sampled field aliases.
    const double sum_width = std::numbers::sqrt2 / (state.waist_w0() * q_per_u);
    if (grid.spacing() > sum_width / 3.0) {
        std::ostringstream msg;
        msg << "momentum_to_slit_plane: grid spacing " << grid.spacing()
            << " m undersamples the pair-correlation width " << sum_width
            << " m; increase grid n or reduce extent";
        throw ValidationError(msg.str());
    }

    // The field keeps the continuum normalization (unit integral over the
    // whole transverse plane): the pair-separation tail extends far past any
    // practical window, and renormalizing on the grid would inflate the
    // density seen by the slits. Grid totals below one are honest truncation.
    Field2D field;
    field.axis1 = grid;
    field.axis2 = grid;
    field.plane = PlaneTag::slit;
    field.values.resize(grid.n, grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double q1 = grid.point(i) * q_per_u;
        for (int j = 0; j < grid.n; ++j) {
            const double q2 = grid.point(j) * q_per_u;
            field.values(i, j) = q_per_u * state.momentum_amplitude(q1, q2);
        }
    }
    return field;
}

Field2D apply_double_slit(const Field2D& field, const SlitParams& slits) {
    if (field.plane != PlaneTag::slit)
        throw ValidationError("apply_double_slit: field is not at the slit plane");
    slits.validate();

    // The aperture must lie inside the sampled window, otherwise transmitted
    // probability is silently clipped.
    const double support = slits.half_separation + slits.opening / 2.0;
    const double half_window = field.axis1.extent / 2.0 - field.axis1.spacing();
    if (support > half_window) {
        std::ostringstream msg;
        msg << "apply_double_slit: aperture extends to +/-" << support
            << " m but the grid covers only +/-" << half_window
            << " m; transmitted probability would be truncated";
        throw ValidationError(msg.str());
    }

    Eigen::VectorXd mask(field.axis1.n);
    for (int i = 0; i < field.axis1.n; ++i)
        mask(i) = static_cast<double>(slit_aperture(field.axis1.point(i), slits));

    Field2D out = field;
    out.values = mask.asDiagonal() * field.values * mask.asDiagonal();
    return out;
}

Field2D propagate_to_detector(const Field2D& field, const OpticalTrain& train,
                              const Grid1D& detector_grid, const SlitParams& slits) {
    if (field.plane != PlaneTag::slit)
        throw ValidationError("propagate_to_detector: field is not at the slit plane");
    train.validate();

    const double fringe_period = train.focal_times_lambda() / slits.separation();
    if (fringe_period < 4.0 * detector_grid.spacing()) {
        std::ostringstream msg;
        msg << "propagate_to_detector: detector grid spacing " << detector_grid.spacing()
            << " m undersamples the fringe period " << fringe_period
            << " m (need at least 4 samples per fringe)";
        throw ValidationError(msg.str());
    }

    Field2D out;
    out.axis1 = detector_grid;
    out.axis2 = detector_grid;
    out.plane = PlaneTag::detector;
    out.values = scaled_fourier_2d(field.values, field.axis1, detector_grid,
                                   train.focal_times_lambda());
    out.normalize();
    return out;
}

Jpd2D detector_jpd(const Field2D& field) {
    if (field.plane != PlaneTag::detector)
        throw ValidationError("detector_jpd: field is not at the detector plane");
    Jpd2D jpd;
    jpd.axis = field.axis1;
    jpd.p = field.values.cwiseAbs2();
    jpd.p = ((jpd.p + jpd.p.transpose()) / 2.0).eval(); // exchange symmetry, exact
    jpd.normalize();
    return jpd;
}

namespace {

// Slit grid whose cell boundaries coincide with the aperture edges, so the
// sampled 0/1 mask integrates the rect exactly. Falls back to a fine
// unaligned grid when the edge ratio is irrational in grid units.
Grid1D edge_aligned_slit_grid(const SlitParams& slits, int n, double target_spacing) {
    const double e1 = slits.half_separation - slits.opening / 2.0;
    const double e2 = slits.half_separation + slits.opening / 2.0;
    const int m_lo = static_cast<int>(std::ceil(e1 / target_spacing));
    const int m_hi = static_cast<int>(std::ceil(e1 / (0.25 * target_spacing)));
    for (int m = m_lo; m <= m_hi; ++m) {
        const double delta = e1 / m;
        const double cells2 = e2 / delta;
        if (std::abs(cells2 - std::round(cells2)) < 1e-9 && n * delta / 2.0 > e2 * 1.5)
            return Grid1D::make(n, n * delta);
    }
    return Grid1D::make(n, n * target_spacing);
}

} // namespace

double convolution_crosscheck(const BiphotonState& state, const SlitParams& slits,
                              const OpticalTrain& train, const Grid1D& detector_grid) {
    if (detector_grid.n > 256)
        throw ConfigError("convolution_crosscheck: detector grid must have n <= 256");
    slits.validate();
    train.validate();

    // Route 1: the production pipeline on an edge-aligned slit grid.
    const Grid1D slit_grid = edge_aligned_slit_grid(slits, 2048, 1.6e-6);
    Field2D slit_field = momentum_to_slit_plane(state, slit_grid, train);
    slit_field = apply_double_slit(slit_field, slits);
    const Field2D det = propagate_to_detector(slit_field, train, detector_grid, slits);
    Eigen::MatrixXd j1 = detector_jpd(det).p;

    // Route 2: closed-form aperture transform convolved with the scaled
    // position wavefunction on a fine quadrature patch around the origin.
    const double fl = train.focal_times_lambda();
    const double x_per_tau = train.f2 / train.f;
    const double sum_std = std::numbers::sqrt2 * state.waist_w0() / x_per_tau;
    const double diff_std = std::numbers::sqrt2 * state.crystal_b() / x_per_tau;
    const double half = 6.0 * (sum_std + diff_std);
    const double step = std::min(sum_std, diff_std) / 6.0;
    const int nt = static_cast<int>(std::ceil(2.0 * half / step)) | 1;

    Eigen::VectorXd tau(nt);
    for (int i = 0; i < nt; ++i) tau(i) = (i - 0.5 * (nt - 1)) * step;

    Eigen::MatrixXd g(nt, nt);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nt; ++j)
            g(i, j) = state.position_amplitude(x_per_tau * tau(i), x_per_tau * tau(j));

    const double pi = std::numbers::pi;
    Eigen::MatrixXd kernel(detector_grid.n, nt);
    for (int k = 0; k < detector_grid.n; ++k) {
        const double xk = detector_grid.point(k);
        for (int i = 0; i < nt; ++i) {
            const double arg = xk - tau(i);
            kernel(k, i) = 2.0 * slits.opening *
                           std::cos(2.0 * pi * slits.half_separation * arg / fl) *
                           sinc(pi * slits.opening * arg / fl);
        }
    }

    const Eigen::MatrixXd field2 = kernel * g * kernel.transpose();
    Eigen::MatrixXd j2 = field2.cwiseAbs2();
    j2 /= j2.sum();
    j1 /= j1.sum();

    return (j1 - j2).cwiseAbs().maxCoeff() / j1.maxCoeff();
}

} // namespace biphoton
