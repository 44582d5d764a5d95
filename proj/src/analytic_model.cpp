#include "biphoton/analytic_model.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "biphoton/errors.hpp"

namespace biphoton {

void SlitQubitState::validate() const {
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2.0))
        throw ValidationError("SlitQubitState: theta must lie in [0, pi/2]");
}

Visibilities visibilities_from_theta(double theta, double phi) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Visibilities v;
    v.v_minus = c * c;
    v.v_plus = s * s;
    v.v_m = std::sin(2.0 * theta) * std::cos(phi);
    v.v_12 = c * c - s * s;
    return v;
}

double g2_pattern(double x1, double x2, const SlitQubitState& state, double k, double d,
                  double f) {
    const Visibilities v = visibilities_from_state(state);
    const double p1 = k * d * x1 / (2.0 * f);
    const double p2 = k * d * x2 / (2.0 * f);
    const double g2 = 1.0 + v.v_minus * std::cos(p1 - p2) + v.v_plus * std::cos(p1 + p2) +
                      v.v_m * (std::cos(p1) + std::cos(p2));
    if (g2 < -1e-12)
        throw ValidationError("g2_pattern: negative coincidence density; invalid visibilities");
    return g2 < 0.0 ? 0.0 : g2;
}

SlitQubitState theta_phi_from_field(const Field2D& slit_field, const SlitParams& slits) {
    if (slit_field.plane != PlaneTag::slit)
        throw ValidationError("theta_phi_from_field: field is not at the slit plane");
    slits.validate();

    const Grid1D& grid = slit_field.axis1;
    const double du = grid.spacing();
    const double half = slits.opening / 2.0;

    // Quadrature weights of the left/right slit windows on the grid.
    Eigen::VectorXd left = Eigen::VectorXd::Zero(grid.n);
    Eigen::VectorXd right = Eigen::VectorXd::Zero(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double u = grid.point(i);
        if (std::abs(u + slits.half_separation) <= half) left(i) = du;
        if (std::abs(u - slits.half_separation) <= half) right(i) = du;
    }

    const auto project = [&](const Eigen::VectorXd& w1, const Eigen::VectorXd& w2) {
        return (w1.cast<std::complex<double>>().transpose() * slit_field.values *
                w2.cast<std::complex<double>>())(0);
    };

    const std::complex<double> antipaired = project(left, right) + project(right, left);
    const std::complex<double> paired = project(left, left) + project(right, right);

    if (std::abs(antipaired) < 1e-12 && std::abs(paired) < 1e-12)
        throw ValidationError(
            "theta_phi_from_field: field has no support on the slit rectangles");

    SlitQubitState state;
    state.theta = std::atan2(std::abs(paired), std::abs(antipaired));
    state.phi = std::abs(paired) < 1e-300 || std::abs(antipaired) < 1e-300
                    ? 0.0
                    : std::arg(paired / antipaired);
    return state;
}

} // namespace biphoton
