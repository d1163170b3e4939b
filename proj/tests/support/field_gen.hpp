#pragma once

#include <vector>

#include "psdot/field.hpp"
#include "psdot/grid.hpp"
#include "psdot/random.hpp"
#include "support/matrix_gen.hpp"

namespace psdot::testgen {

/// Random uniformly-coercive field: A A^* + floor * I at every point.
inline PsdField random_coercive_field(GaussianStream& rng, const FrequencyGrid& grid, int m,
                                      double floor = 0.5) {
    std::vector<HermitianMatrix> values;
    values.reserve(grid.point_count());
    for (std::size_t p = 0; p < grid.point_count(); ++p)
        values.push_back(random_pd(rng, m, floor));
    return PsdField(grid, m, std::move(values));
}

} // namespace psdot::testgen
