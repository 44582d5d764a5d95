#include "biphoton/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "biphoton/errors.hpp"

namespace biphoton {

std::vector<double> Grid1D::points() const {
    std::vector<double> p(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = point(i);
    return p;
}

Grid1D Grid1D::conjugate(double scale) const {
    Grid1D g;
    g.n = n;
    g.extent = scale / spacing();
    return g;
}

int Grid1D::nearest_index(double x) const {
    const int i = static_cast<int>(std::lround(x / spacing() + 0.5 * (n - 1)));
    return std::clamp(i, 0, n - 1);
}

Grid1D Grid1D::make(int n, double extent) {
    if (n < 64 || (n & (n - 1)) != 0)
        throw ConfigError("Grid1D: n must be a power of two >= 64, got " + std::to_string(n));
    if (!(extent > 0.0))
        throw ConfigError("Grid1D: extent must be > 0");
    Grid1D g;
    g.n = n;
    g.extent = extent;
    return g;
}

} // namespace biphoton
