#include "mfg/field.hpp"

#include <cmath>

namespace mfg {

std::optional<Field::BadSample> Field::first_non_finite() const {
    for (std::size_t k = 0; k < levels_; ++k)
        for (std::size_t i = 0; i < nodes_; ++i) {
            const double v = (*this)(k, i);
            if (!std::isfinite(v)) return BadSample{k, i, v};
        }
    return std::nullopt;
}

} // namespace mfg
