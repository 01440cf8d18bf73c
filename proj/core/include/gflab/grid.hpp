#pragma once
#include <cstddef>
#include <functional>
#include <vector>

namespace gflab {

/// Closed interval on the data line.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

/// Domain-of-dependence region K_T over the base [-kappa, kappa]:
/// upper orientation is {0 <= t <= T, |x| <= kappa - t}, lower is its
/// mirror image under t -> -t.
struct Trapezoid {
    enum class Orientation { Upper, Lower };

    double kappa = 1.0;
    double T = 1.0;
    Orientation orientation = Orientation::Upper;

    Trapezoid() = default;
    Trapezoid(double kappa_, double T_, Orientation o = Orientation::Upper);

    Interval base() const { return {-kappa, kappa}; }
    bool contains(double x, double t, double tol = 0.0) const;
    /// Sub-trapezoid K_s with the same base, 0 <= s <= T.
    Trapezoid up_to(double s) const;
};

/// Uniformly sampled real function of one variable; node i sits at
/// x0 + i*h. Values are immutable after construction.
class GridFunction1D {
public:
    GridFunction1D() = default;
    GridFunction1D(double x0, double h, std::vector<double> values);

    static GridFunction1D sample(double x0, double h, std::size_t n,
                                 const std::function<double(double)>& f);
    static GridFunction1D zeros(double x0, double h, std::size_t n);

    double x0() const { return x0_; }
    double spacing() const { return h_; }
    std::size_t size() const { return values_.size(); }
    double x(std::size_t i) const { return x0_ + static_cast<double>(i) * h_; }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    Interval extent() const { return {x0_, x(values_.size() - 1)}; }

    bool same_geometry(const GridFunction1D& other, double rel_tol = 1e-12) const;

    /// Evaluate by linear interpolation; x must lie inside the extent.
    double interpolate(double x) const;

    GridFunction1D map(const std::function<double(double)>& f) const;
    friend GridFunction1D zip(const GridFunction1D& a, const GridFunction1D& b,
                              const std::function<double(double, double)>& f);

private:
    double x0_ = 0.0;
    double h_ = 1.0;
    std::vector<double> values_;
};

/// Dense rectangle of samples on a characteristic-aligned space-time grid
/// (identical spacing h in x and t). Row n is the time level t0 + n*h.
class GridFunction2D {
public:
    GridFunction2D() = default;
    GridFunction2D(double x0, double t0, double h, std::size_t nx, std::size_t nt,
                   std::vector<double> values);

    static GridFunction2D sample(double x0, double t0, double h, std::size_t nx,
                                 std::size_t nt,
                                 const std::function<double(double, double)>& f);
    static GridFunction2D zeros(double x0, double t0, double h, std::size_t nx,
                                std::size_t nt);

    double x0() const { return x0_; }
    double t0() const { return t0_; }
    double spacing() const { return h_; }
    std::size_t nx() const { return nx_; }
    std::size_t nt() const { return nt_; }
    double x(std::size_t i) const { return x0_ + static_cast<double>(i) * h_; }
    double t(std::size_t n) const { return t0_ + static_cast<double>(n) * h_; }
    double at(std::size_t i, std::size_t n) const { return values_[n * nx_ + i]; }
    const std::vector<double>& values() const { return values_; }

    bool same_geometry(const GridFunction2D& other, double rel_tol = 1e-12) const;
    bool covers(const Trapezoid& region, double tol) const;

    /// Evaluate by bilinear interpolation; (x,t) must lie inside the extent.
    double interpolate(double x, double t) const;

    GridFunction2D map(const std::function<double(double)>& f) const;
    friend GridFunction2D zip(const GridFunction2D& a, const GridFunction2D& b,
                              const std::function<double(double, double)>& f);

private:
    double x0_ = 0.0, t0_ = 0.0;
    double h_ = 1.0;
    std::size_t nx_ = 0, nt_ = 0;
    std::vector<double> values_;
};

GridFunction1D zip(const GridFunction1D& a, const GridFunction1D& b,
                   const std::function<double(double, double)>& f);
GridFunction2D zip(const GridFunction2D& a, const GridFunction2D& b,
                   const std::function<double(double, double)>& f);

} // namespace gflab
