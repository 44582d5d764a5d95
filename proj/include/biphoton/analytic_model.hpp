#ifndef BIPHOTON_ANALYTIC_MODEL_HPP
#define BIPHOTON_ANALYTIC_MODEL_HPP

// Two-qubit model of the pair behind an infinitesimal double slit:
//
//   |psi> = cos(theta) (|L R> + |R L>)/sqrt(2)
//         + e^{i phi} sin(theta) (|L L> + |R R>)/sqrt(2)
//
// theta weighs antipaired against paired passage, phi their relative
// phase. The coincidence pattern is
//
//   G2 = 1 + V- cos(p1 - p2) + V+ cos(p1 + p2) + Vm (cos p1 + cos p2),
//   p_i = k d x_i / (2 f),
//
// with V- = cos^2(theta), V+ = sin^2(theta), Vm = sin(2 theta) cos(phi),
// V12 = V- - V+. Identities: V- + V+ = 1 always, Vm^2 + V12^2 = 1 at
// phi = 0. Note this model's p_i convention puts the marginal fringe
// period at 2 f lambda / d; the numerical pipeline's closed forms use
// their own scaling, so each is asserted against its own definition.

#include "biphoton/field.hpp"
#include "biphoton/slits.hpp"

namespace biphoton {

struct SlitQubitState {
    double theta = 0.0; // in [0, pi/2]
    double phi = 0.0;

    void validate() const;
};

struct Visibilities {
    double v_minus = 1.0;
    double v_plus = 0.0;
    double v_m = 0.0;
    double v_12 = 1.0;
};

Visibilities visibilities_from_theta(double theta, double phi);

inline Visibilities visibilities_from_state(const SlitQubitState& s) {
    return visibilities_from_theta(s.theta, s.phi);
}

// Unnormalized coincidence density at detector positions (x1, x2);
// k is the signal wavenumber, d the slit half separation, f the focal
// length after the slit. Throws ValidationError if the four-term sum
// comes out negative (impossible for visibilities from a valid state).
double g2_pattern(double x1, double x2, const SlitQubitState& state, double k, double d,
                  double f);

// Projects a pre-aperture slit-plane field onto the {L,R} x {L,R} basis by
// integrating the amplitude over the four slit-pair rectangles:
// theta = atan2(|paired|, |antipaired|), phi = arg(paired / antipaired).
SlitQubitState theta_phi_from_field(const Field2D& slit_field, const SlitParams& slits);

} // namespace biphoton

#endif
