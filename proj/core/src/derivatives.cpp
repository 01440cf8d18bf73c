#include "gflab/derivatives.hpp"

#include <string>
#include <vector>

#include "gflab/errors.hpp"

namespace gflab {

std::string MultiIndex::label() const {
    return "(" + std::to_string(x) + "," + std::to_string(t) + ")";
}

namespace {

void check_order(int order, std::size_t n, const char* axis) {
    if (order < 0) throw DomainError("derivative order must be nonnegative");
    if (n < 2 * static_cast<std::size_t>(order) + 1)
        throw DomainError(std::string("grid too coarse for derivative order ") +
                          std::to_string(order) + " along " + axis);
}

} // namespace

GridFunction1D fd_derivative(const GridFunction1D& f, int order) {
    check_order(order, f.size(), "x");
    GridFunction1D cur = f;
    for (int k = 0; k < order; ++k) {
        const double inv2h = 0.5 / cur.spacing();
        std::vector<double> v(cur.size() - 2);
        for (std::size_t i = 0; i + 2 < cur.size(); ++i)
            v[i] = (cur[i + 2] - cur[i]) * inv2h;
        cur = GridFunction1D(cur.x0() + cur.spacing(), cur.spacing(), std::move(v));
    }
    return cur;
}

GridFunction2D fd_derivative(const GridFunction2D& f, const MultiIndex& alpha) {
    check_order(alpha.x, f.nx(), "x");
    check_order(alpha.t, f.nt(), "t");
    GridFunction2D cur = f;
    for (int k = 0; k < alpha.x; ++k) {
        const double inv2h = 0.5 / cur.spacing();
        const std::size_t nx = cur.nx() - 2, nt = cur.nt();
        std::vector<double> v(nx * nt);
        for (std::size_t n = 0; n < nt; ++n)
            for (std::size_t i = 0; i < nx; ++i)
                v[n * nx + i] = (cur.at(i + 2, n) - cur.at(i, n)) * inv2h;
        cur = GridFunction2D(cur.x0() + cur.spacing(), cur.t0(), cur.spacing(), nx, nt,
                             std::move(v));
    }
    for (int k = 0; k < alpha.t; ++k) {
        const double inv2h = 0.5 / cur.spacing();
        const std::size_t nx = cur.nx(), nt = cur.nt() - 2;
        std::vector<double> v(nx * nt);
        for (std::size_t n = 0; n < nt; ++n)
            for (std::size_t i = 0; i < nx; ++i)
                v[n * nx + i] = (cur.at(i, n + 2) - cur.at(i, n)) * inv2h;
        cur = GridFunction2D(cur.x0(), cur.t0() + cur.spacing(), cur.spacing(), nx, nt,
                             std::move(v));
    }
    return cur;
}

} // namespace gflab
