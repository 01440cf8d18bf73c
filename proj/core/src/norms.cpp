#include "gflab/norms.hpp"

#include <algorithm>
#include <cmath>

#include "gflab/errors.hpp"

namespace gflab {
namespace {

// Geometry tolerance for deciding node membership; the grids are
// characteristic-aligned so boundary nodes sit on region lines exactly
// up to rounding.
double geom_tol(double h) { return 1e-9 * h; }

void require_coverage(const GridFunction2D& f, const Trapezoid& region) {
    if (!f.covers(region, geom_tol(f.spacing())))
        throw DomainError("region not contained in grid extent");
}

void require_coverage(const GridFunction1D& f, const Interval& region) {
    const double tol = geom_tol(f.spacing());
    if (f.x0() > region.lo + tol || f.x(f.size() - 1) < region.hi - tol)
        throw DomainError("interval not contained in grid extent");
}

template <class NodeFn>
void for_each_node_in(const GridFunction2D& f, const Trapezoid& region, std::size_t stride,
                      NodeFn&& fn) {
    const double tol = geom_tol(f.spacing());
    const bool upper = region.orientation == Trapezoid::Orientation::Upper;
    for (std::size_t n = 0; n < f.nt(); n += stride) {
        const double t = f.t(n);
        const double tt = upper ? t : -t;
        if (tt < -tol || tt > region.T + tol) continue;
        const double half_width = region.kappa - tt;
        for (std::size_t i = 0; i < f.nx(); i += stride) {
            const double x = f.x(i);
            if (std::abs(x) > half_width + tol) continue;
            const bool on_time_edge = tt < tol || tt > region.T - tol;
            const bool on_slant = std::abs(x) > half_width - tol;
            fn(i, n, on_time_edge, on_slant);
        }
    }
}

double sup_impl(const GridFunction2D& f, const Trapezoid& region, std::size_t stride) {
    double m = 0.0;
    for_each_node_in(f, region, stride, [&](std::size_t i, std::size_t n, bool, bool) {
        m = std::max(m, std::abs(f.at(i, n)));
    });
    return m;
}

double l1_impl(const GridFunction2D& f, const Trapezoid& region, std::size_t stride) {
    const double cell = f.spacing() * static_cast<double>(stride);
    double sum = 0.0;
    for_each_node_in(f, region, stride,
                     [&](std::size_t i, std::size_t n, bool time_edge, bool slant) {
                         double w = 1.0;
                         if (time_edge) w *= 0.5;
                         if (slant) w *= 0.5;
                         sum += w * std::abs(f.at(i, n));
                     });
    return sum * cell * cell;
}

} // namespace

double sup_norm(const GridFunction2D& f, const Trapezoid& region) {
    require_coverage(f, region);
    return sup_impl(f, region, 1);
}

double sup_norm(const GridFunction1D& f, const Interval& region) {
    require_coverage(f, region);
    const double tol = geom_tol(f.spacing());
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.x(i);
        if (x < region.lo - tol || x > region.hi + tol) continue;
        m = std::max(m, std::abs(f[i]));
    }
    return m;
}

double l1_norm(const GridFunction2D& f, const Trapezoid& region) {
    require_coverage(f, region);
    return l1_impl(f, region, 1);
}

double l1_norm(const GridFunction1D& f, const Interval& region) {
    require_coverage(f, region);
    const double tol = geom_tol(f.spacing());
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.x(i);
        if (x < region.lo - tol || x > region.hi + tol) continue;
        const bool edge = x < region.lo + tol || x > region.hi - tol;
        sum += (edge ? 0.5 : 1.0) * std::abs(f[i]);
    }
    return sum * f.spacing();
}

NormValue sup_norm_with_budget(const GridFunction2D& f, const Trapezoid& region) {
    require_coverage(f, region);
    const double fine = sup_impl(f, region, 1);
    const double coarse = sup_impl(f, region, 2);
    return {fine, std::abs(fine - coarse)};
}

NormValue l1_norm_with_budget(const GridFunction2D& f, const Trapezoid& region) {
    require_coverage(f, region);
    const double fine = l1_impl(f, region, 1);
    const double coarse = l1_impl(f, region, 2);
    return {fine, std::abs(fine - coarse)};
}

double integral(const GridFunction1D& f) {
    if (f.size() < 2) return 0.0;
    double sum = 0.5 * (f[0] + f[f.size() - 1]);
    for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
    return sum * f.spacing();
}

GridFunction1D cumulative_integral(const GridFunction1D& f) {
    std::vector<double> v(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i)
        v[i] = v[i - 1] + 0.5 * f.spacing() * (f[i - 1] + f[i]);
    return GridFunction1D(f.x0(), f.spacing(), std::move(v));
}

} // namespace gflab
