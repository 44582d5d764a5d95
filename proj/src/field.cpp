#include "biphoton/field.hpp"

#include <cmath>

#include "biphoton/errors.hpp"

namespace biphoton {

void Field2D::normalize() {
    const double total = total_probability();
    if (!(total > 0.0) || !std::isfinite(total))
        throw ValidationError("Field2D::normalize: total probability is zero or not finite");
    values /= std::sqrt(total);
}

} // namespace biphoton
