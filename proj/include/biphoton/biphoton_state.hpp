#ifndef BIPHOTON_BIPHOTON_STATE_HPP
#define BIPHOTON_BIPHOTON_STATE_HPP

#include <array>

namespace biphoton {

using Vec2 = std::array<double, 2>;

// Collinear degenerate SPDC crystal description. The crystal parameter
//   b = sqrt(L / (3 k_p))
// is the transverse coherence length of the emission (the birth-zone size);
// k_p = 2 pi n / lambda_pump. The refractive index entering k_p is
// configurable and defaults to 1.
struct CrystalParams {
    double length = 5e-3;
    double pump_wavelength = 405e-9;
    double refractive_index = 1.0;

    double pump_wavenumber() const;
    double crystal_b() const;
    void validate() const; // throws std::domain_error on non-physical values
};

struct PumpParams {
    double waist_w0 = 30e-6;
    double phase_phi = 0.0; // relative phase between paired/antipaired passage

    void validate() const;
};

double crystal_parameter_b(double length, double pump_wavenumber);
double birth_zone_number(double waist_w0, double crystal_b);
double schmidt_number(double birth_zone_n);

struct BirthZoneStats {
    double n = 1.0; // birth zone number N = w0 / b
    double k = 1.0; // Schmidt number K = (N + 1/N)^2 / 4
};

BirthZoneStats birth_zone_stats(double waist_w0, double crystal_b);

// Double-Gaussian biphoton wavefunction for a pump waist w0 and crystal
// parameter b, in both transverse representations:
//
//   Psi(q1, q2) = A exp(-w0^2 |q1+q2|^2 / 4) exp(-b^2 |q1-q2|^2 / 4)
//   psi(x1, x2) = B exp(-|x1+x2|^2 / (4 w0^2)) exp(-|x1-x2|^2 / (4 b^2))
//
// The pump Gaussian constrains the pair's mean coordinate, the
// phase-matching Gaussian their relative coordinate. A and B normalize
// |amplitude|^2 to unit integral; both representations are a Fourier pair
// under the unitary transform convention. Amplitudes are real and positive.
//
// All evaluators are pure; instances are safe to share across threads.
class BiphotonState {
public:
    BiphotonState(double waist_w0, double crystal_b, double signal_wavelength = 810e-9);

    double waist_w0() const { return w0_; }
    double crystal_b() const { return b_; }
    double birth_zone_n() const { return w0_ / b_; }
    double signal_wavelength() const { return signal_wavelength_; }

    // Normalization constants for 1 or 2 transverse components per photon.
    double momentum_norm(int dim) const;
    double position_norm(int dim) const;

    // One transverse component per photon (the double-slit pipeline works
    // in the coordinate perpendicular to the slits).
    double momentum_amplitude(double q1, double q2) const;
    double position_amplitude(double x1, double x2) const;

    // Full transverse vectors.
    double momentum_amplitude(const Vec2& q1, const Vec2& q2) const;
    double position_amplitude(const Vec2& x1, const Vec2& x2) const;

private:
    double w0_;
    double b_;
    double signal_wavelength_;
};

// Same state expressed through (N, b):
//   Psi_N = A exp(-b^2 (N^2+1) |q1|^2 / 4) exp(-b^2 (N^2+1) |q2|^2 / 4)
//             exp(-b^2 (N^2-1) q1.q2 / 2).
// The cross term carries all the entanglement and vanishes at N = 1.
// Matches BiphotonState::momentum_amplitude with w0 = N b.
double dg_birthzone_amplitude(double q1, double q2, double birth_zone_n, double crystal_b);
double dg_birthzone_amplitude(const Vec2& q1, const Vec2& q2, double birth_zone_n, double crystal_b);

} // namespace biphoton

#endif
