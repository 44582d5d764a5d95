#ifndef BIPHOTON_SLITS_HPP
#define BIPHOTON_SLITS_HPP

#include <cmath>

#include "biphoton/errors.hpp"

namespace biphoton {

// Double-slit geometry: two openings of width `opening` centered at
// +/- `half_separation` (center-to-center separation is twice that).
struct SlitParams {
    double half_separation = 250e-6;
    double opening = 150e-6;

    double separation() const { return 2.0 * half_separation; }

    void validate() const {
        if (!(opening > 0.0))
            throw ConfigError("slits: opening must be > 0");
        if (!(half_separation > opening / 2.0))
            throw ConfigError("slits: half separation must exceed opening/2 (slits must not overlap)");
    }
};

// Binary transmission of the double slit at transverse position u.
// rect boundaries are closed: a point exactly on a slit edge transmits.
inline int slit_aperture(double u, const SlitParams& slits) {
    const double half = slits.opening / 2.0;
    return (std::abs(u - slits.half_separation) <= half ||
            std::abs(u + slits.half_separation) <= half)
               ? 1
               : 0;
}

} // namespace biphoton

#endif
