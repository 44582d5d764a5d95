#ifndef BIPHOTON_GRID_HPP
#define BIPHOTON_GRID_HPP

#include <vector>

namespace biphoton {

// Uniform 1D sampling grid, cell-centered on [-extent/2, extent/2].
// Sample i sits at (i - (n-1)/2) * spacing, so the points are symmetric
// about 0 and the n cells tile the extent exactly.
struct Grid1D {
    int n = 0;
    double extent = 0.0;

    double spacing() const { return extent / n; }
    double point(int i) const { return (i - 0.5 * (n - 1)) * spacing(); }
    std::vector<double> points() const;

    // Conjugate grid of the Fourier mapping u -> X with kernel
    // exp(-2*pi*i*u*X / scale): spacing_X = scale / (n * spacing_u).
    Grid1D conjugate(double scale) const;

    // Index of the grid point nearest to x (clamped to range).
    int nearest_index(double x) const;

    // Throws ConfigError unless n is a power of two >= 64 and extent > 0.
    static Grid1D make(int n, double extent);
};

} // namespace biphoton

#endif
