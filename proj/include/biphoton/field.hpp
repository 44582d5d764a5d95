#ifndef BIPHOTON_FIELD_HPP
#define BIPHOTON_FIELD_HPP

#include <Eigen/Dense>

#include "biphoton/grid.hpp"

namespace biphoton {

enum class PlaneTag { momentum, slit, detector };

// Two-photon complex amplitude sampled on a grid pair: values(i, j) is the
// amplitude at (axis1.point(i), axis2.point(j)). Total probability uses the
// grid measure, sum |v|^2 * dx1 * dx2.
struct Field2D {
    Eigen::MatrixXcd values;
    Grid1D axis1;
    Grid1D axis2;
    PlaneTag plane = PlaneTag::slit;

    double total_probability() const {
        return values.squaredNorm() * axis1.spacing() * axis2.spacing();
    }

    // Scales so that total_probability() == 1.
    void normalize();
};

// Discrete joint probability distribution over grid-point pairs,
// normalized to unit sum.
struct Jpd2D {
    Eigen::MatrixXd p;
    Grid1D axis;

    void normalize() { p /= p.sum(); }
};

} // namespace biphoton

#endif
