#pragma once
#include <cstddef>
#include <string>

#include "gflab/grid.hpp"

namespace gflab {

/// Multi-index for space-time derivatives; 1D grids use x only.
struct MultiIndex {
    int x = 0;
    int t = 0;

    int order() const { return x + t; }
    std::string label() const;
    bool operator==(const MultiIndex&) const = default;
};

/// Central finite differences, second-order accurate, applied as repeated
/// first-derivative stencils. The domain shrinks by one node per side per
/// differentiation along the respective axis.
GridFunction1D fd_derivative(const GridFunction1D& f, int order);
GridFunction2D fd_derivative(const GridFunction2D& f, const MultiIndex& alpha);

} // namespace gflab
