#include "biphoton/biphoton_state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace biphoton {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::domain_error(std::string(name) + " must be > 0");
}

double norm2(const Vec2& v) { return v[0] * v[0] + v[1] * v[1]; }

} // namespace

double CrystalParams::pump_wavenumber() const {
    return 2.0 * std::numbers::pi * refractive_index / pump_wavelength;
}

double CrystalParams::crystal_b() const {
    return crystal_parameter_b(length, pump_wavenumber());
}

void CrystalParams::validate() const {
    require_positive(length, "crystal length");
    require_positive(pump_wavelength, "pump wavelength");
    require_positive(refractive_index, "refractive index");
}

void PumpParams::validate() const {
    require_positive(waist_w0, "pump waist w0");
}

double crystal_parameter_b(double length, double pump_wavenumber) {
    require_positive(length, "crystal length");
    require_positive(pump_wavenumber, "pump wavenumber");
    return std::sqrt(length / (3.0 * pump_wavenumber));
}

double birth_zone_number(double waist_w0, double crystal_b) {
    require_positive(waist_w0, "pump waist w0");
    require_positive(crystal_b, "crystal parameter b");
    return waist_w0 / crystal_b;
}

double schmidt_number(double birth_zone_n) {
    require_positive(birth_zone_n, "birth zone number");
    const double s = birth_zone_n + 1.0 / birth_zone_n;
    return s * s / 4.0;
}

BirthZoneStats birth_zone_stats(double waist_w0, double crystal_b) {
    const double n = birth_zone_number(waist_w0, crystal_b);
    return BirthZoneStats{n, schmidt_number(n)};
}

BiphotonState::BiphotonState(double waist_w0, double crystal_b, double signal_wavelength)
    : w0_(waist_w0), b_(crystal_b), signal_wavelength_(signal_wavelength) {
    require_positive(waist_w0, "pump waist w0");
    require_positive(crystal_b, "crystal parameter b");
    require_positive(signal_wavelength, "signal wavelength");
}

// Gaussian normalization in the rotated (sum, difference)/sqrt(2) frame:
// each transverse component contributes sqrt(w0 b / pi) in momentum and
// 1/sqrt(pi w0 b) in position.
double BiphotonState::momentum_norm(int dim) const {
    const double per_axis = std::sqrt(w0_ * b_ / std::numbers::pi);
    return dim == 1 ? per_axis : per_axis * per_axis;
}

double BiphotonState::position_norm(int dim) const {
    const double per_axis = 1.0 / std::sqrt(std::numbers::pi * w0_ * b_);
    return dim == 1 ? per_axis : per_axis * per_axis;
}

double BiphotonState::momentum_amplitude(double q1, double q2) const {
    const double sum = q1 + q2;
    const double diff = q1 - q2;
    return momentum_norm(1) *
           std::exp(-w0_ * w0_ * sum * sum / 4.0 - b_ * b_ * diff * diff / 4.0);
}

double BiphotonState::position_amplitude(double x1, double x2) const {
    const double sum = x1 + x2;
    const double diff = x1 - x2;
    return position_norm(1) *
           std::exp(-sum * sum / (4.0 * w0_ * w0_) - diff * diff / (4.0 * b_ * b_));
}

double BiphotonState::momentum_amplitude(const Vec2& q1, const Vec2& q2) const {
    const Vec2 sum{q1[0] + q2[0], q1[1] + q2[1]};
    const Vec2 diff{q1[0] - q2[0], q1[1] - q2[1]};
    return momentum_norm(2) *
           std::exp(-w0_ * w0_ * norm2(sum) / 4.0 - b_ * b_ * norm2(diff) / 4.0);
}

double BiphotonState::position_amplitude(const Vec2& x1, const Vec2& x2) const {
    const Vec2 sum{x1[0] + x2[0], x1[1] + x2[1]};
    const Vec2 diff{x1[0] - x2[0], x1[1] - x2[1]};
    return position_norm(2) *
           std::exp(-norm2(sum) / (4.0 * w0_ * w0_) - norm2(diff) / (4.0 * b_ * b_));
}

double dg_birthzone_amplitude(double q1, double q2, double birth_zone_n, double crystal_b) {
    require_positive(birth_zone_n, "birth zone number");
    require_positive(crystal_b, "crystal parameter b");
    const double b2 = crystal_b * crystal_b;
    const double n2 = birth_zone_n * birth_zone_n;
    const double norm = std::sqrt(birth_zone_n * b2 / std::numbers::pi);
    return norm * std::exp(-b2 * (n2 + 1.0) * (q1 * q1 + q2 * q2) / 4.0 -
                           b2 * (n2 - 1.0) * (q1 * q2) / 2.0);
}

double dg_birthzone_amplitude(const Vec2& q1, const Vec2& q2, double birth_zone_n,
                              double crystal_b) {
    require_positive(birth_zone_n, "birth zone number");
    require_positive(crystal_b, "crystal parameter b");
    const double b2 = crystal_b * crystal_b;
    const double n2 = birth_zone_n * birth_zone_n;
    const double dot = q1[0] * q2[0] + q1[1] * q2[1];
    const double norm = birth_zone_n * b2 / std::numbers::pi;
    return norm * std::exp(-b2 * (n2 + 1.0) * (norm2(q1) + norm2(q2)) / 4.0 -
                           b2 * (n2 - 1.0) * dot / 2.0);
}

} // namespace biphoton
