#pragma once
#include "gflab/grid.hpp"

namespace gflab {

/// Norm value together with a discretization budget, estimated by
/// re-evaluating the quadrature on every second node.
struct NormValue {
    double value = 0.0;
    double budget = 0.0;
};

/// Max of |f| over grid nodes inside the region. Throws DomainError when
/// the region is not contained in the grid extent.
double sup_norm(const GridFunction2D& f, const Trapezoid& region);
double sup_norm(const GridFunction1D& f, const Interval& region);

/// Midpoint-rule integral of |f| over the region (cell area h^2 per node,
/// half weight on region-boundary nodes).
double l1_norm(const GridFunction2D& f, const Trapezoid& region);
double l1_norm(const GridFunction1D& f, const Interval& region);

NormValue sup_norm_with_budget(const GridFunction2D& f, const Trapezoid& region);
NormValue l1_norm_with_budget(const GridFunction2D& f, const Trapezoid& region);

/// Plain trapezoid quadrature of the samples over the whole extent.
double integral(const GridFunction1D& f);
/// Running trapezoid antiderivative, B[0] = 0 on the same grid.
GridFunction1D cumulative_integral(const GridFunction1D& f);

} // namespace gflab
