#include "gflab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gflab/errors.hpp"

namespace gflab {

Trapezoid::Trapezoid(double kappa_, double T_, Orientation o)
    : kappa(kappa_), T(T_), orientation(o) {
    if (!(kappa > 0.0)) throw DomainError("trapezoid base half-width must be positive");
    if (T < 0.0 || T > kappa + 1e-12)
        throw DomainError("trapezoid height must satisfy 0 <= T <= kappa");
}

bool Trapezoid::contains(double x, double t, double tol) const {
    const double tt = orientation == Orientation::Upper ? t : -t;
    if (tt < -tol || tt > T + tol) return false;
    return std::abs(x) <= kappa - tt + tol;
}

Trapezoid Trapezoid::up_to(double s) const {
    Trapezoid r = *this;
    r.T = std::min(std::max(s, 0.0), T);
    return r;
}

GridFunction1D::GridFunction1D(double x0, double h, std::vector<double> values)
    : x0_(x0), h_(h), values_(std::move(values)) {
    if (!(h_ > 0.0)) throw DomainError("grid spacing must be positive");
    if (values_.empty()) throw DomainError("grid function needs at least one sample");
}

GridFunction1D GridFunction1D::sample(double x0, double h, std::size_t n,
                                      const std::function<double(double)>& f) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(x0 + static_cast<double>(i) * h);
    return GridFunction1D(x0, h, std::move(v));
}

GridFunction1D GridFunction1D::zeros(double x0, double h, std::size_t n) {
    return GridFunction1D(x0, h, std::vector<double>(n, 0.0));
}

bool GridFunction1D::same_geometry(const GridFunction1D& other, double rel_tol) const {
    const double scale = std::max(1.0, std::abs(x0_)) ;
    return values_.size() == other.values_.size() &&
           std::abs(x0_ - other.x0_) <= rel_tol * scale &&
           std::abs(h_ - other.h_) <= rel_tol * h_;
}

double GridFunction1D::interpolate(double x) const {
    const double s = (x - x0_) / h_;
    if (s < -1e-9 || s > static_cast<double>(values_.size() - 1) + 1e-9)
        throw DomainError("interpolation point outside grid extent");
    const auto i = static_cast<std::size_t>(
        std::clamp(std::floor(s), 0.0, static_cast<double>(values_.size() - 2)));
    const double w = s - static_cast<double>(i);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
}

GridFunction1D GridFunction1D::map(const std::function<double(double)>& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) v[i] = f(values_[i]);
    return GridFunction1D(x0_, h_, std::move(v));
}

GridFunction1D zip(const GridFunction1D& a, const GridFunction1D& b,
                   const std::function<double(double, double)>& f) {
    if (!a.same_geometry(b)) throw DomainError("1D grid geometry mismatch");
    std::vector<double> v(a.values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(a.values_[i], b.values_[i]);
    return GridFunction1D(a.x0_, a.h_, std::move(v));
}

GridFunction2D::GridFunction2D(double x0, double t0, double h, std::size_t nx,
                               std::size_t nt, std::vector<double> values)
    : x0_(x0), t0_(t0), h_(h), nx_(nx), nt_(nt), values_(std::move(values)) {
    if (!(h_ > 0.0)) throw DomainError("grid spacing must be positive");
    if (nx_ == 0 || nt_ == 0 || values_.size() != nx_ * nt_)
        throw DomainError("2D value count does not match extents");
}

GridFunction2D GridFunction2D::sample(double x0, double t0, double h, std::size_t nx,
                                      std::size_t nt,
                                      const std::function<double(double, double)>& f) {
    std::vector<double> v(nx * nt);
    for (std::size_t n = 0; n < nt; ++n)
        for (std::size_t i = 0; i < nx; ++i)
            v[n * nx + i] = f(x0 + static_cast<double>(i) * h, t0 + static_cast<double>(n) * h);
    return GridFunction2D(x0, t0, h, nx, nt, std::move(v));
}

GridFunction2D GridFunction2D::zeros(double x0, double t0, double h, std::size_t nx,
                                     std::size_t nt) {
    return GridFunction2D(x0, t0, h, nx, nt, std::vector<double>(nx * nt, 0.0));
}

bool GridFunction2D::same_geometry(const GridFunction2D& other, double rel_tol) const {
    const double scale = std::max({1.0, std::abs(x0_), std::abs(t0_)});
    return nx_ == other.nx_ && nt_ == other.nt_ &&
           std::abs(x0_ - other.x0_) <= rel_tol * scale &&
           std::abs(t0_ - other.t0_) <= rel_tol * scale &&
           std::abs(h_ - other.h_) <= rel_tol * h_;
}

bool GridFunction2D::covers(const Trapezoid& region, double tol) const {
    const double tlo = region.orientation == Trapezoid::Orientation::Upper ? 0.0 : -region.T;
    const double thi = region.orientation == Trapezoid::Orientation::Upper ? region.T : 0.0;
    return x0_ <= -region.kappa + tol && x(nx_ - 1) >= region.kappa - tol &&
           t0_ <= tlo + tol && t(nt_ - 1) >= thi - tol;
}

double GridFunction2D::interpolate(double xq, double tq) const {
    const double sx = (xq - x0_) / h_;
    const double st = (tq - t0_) / h_;
    if (sx < -1e-9 || sx > static_cast<double>(nx_ - 1) + 1e-9 || st < -1e-9 ||
        st > static_cast<double>(nt_ - 1) + 1e-9)
        throw DomainError("interpolation point outside grid extent");
    const auto i = static_cast<std::size_t>(
        std::clamp(std::floor(sx), 0.0, static_cast<double>(nx_ - 2)));
    const auto n = static_cast<std::size_t>(
        std::clamp(std::floor(st), 0.0, static_cast<double>(nt_ - 2)));
    const double wx = sx - static_cast<double>(i);
    const double wt = st - static_cast<double>(n);
    return (1.0 - wt) * ((1.0 - wx) * at(i, n) + wx * at(i + 1, n)) +
           wt * ((1.0 - wx) * at(i, n + 1) + wx * at(i + 1, n + 1));
}

GridFunction2D GridFunction2D::map(const std::function<double(double)>& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) v[i] = f(values_[i]);
    return GridFunction2D(x0_, t0_, h_, nx_, nt_, std::move(v));
}

GridFunction2D zip(const GridFunction2D& a, const GridFunction2D& b,
                   const std::function<double(double, double)>& f) {
    if (!a.same_geometry(b)) throw DomainError("2D grid geometry mismatch");
    std::vector<double> v(a.values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(a.values_[i], b.values_[i]);
    return GridFunction2D(a.x0_, a.t0_, a.h_, a.nx_, a.nt_, std::move(v));
}

} // namespace gflab
