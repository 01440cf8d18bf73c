#include "gflab/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gflab/errors.hpp"
#include "gflab/norms.hpp"

namespace gflab {
namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// Even Gaussian moments: integral of x^{2k} e^{-x^2} over the line.
std::vector<double> gaussian_moments(int count) {
    std::vector<double> g(static_cast<std::size_t>(count));
    g[0] = kSqrtPi;
    for (int k = 1; k < count; ++k)
        g[static_cast<std::size_t>(k)] =
            g[static_cast<std::size_t>(k - 1)] * (2.0 * k - 1.0) / 2.0;
    return g;
}

double norm1(const std::vector<std::vector<double>>& a) {
    double m = 0.0;
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += std::abs(a[i][j]);
        m = std::max(m, col);
    }
    return m;
}

// Gauss-Jordan inverse; the moment matrices are tiny.
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0)
            throw ConstructionError("moment system is singular", std::numeric_limits<double>::infinity());
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        const double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

double eval_poly(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
    return r;
}

// Quintic smoothstep: 1 at u=0, 0 at u=1, with two vanishing derivatives
// at both ends (C^2 across the knots).
double smoothstep_down(double u, int k) {
    switch (k) {
        case 0: return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
        case 1: return -30.0 * u * u + 60.0 * u * u * u - 30.0 * u * u * u * u;
        case 2: return -60.0 * u + 180.0 * u * u - 120.0 * u * u * u;
        case 3: return -60.0 + 360.0 * u - 360.0 * u * u;
        case 4: return 360.0 - 720.0 * u;
        case 5: return -720.0;
        default: return 0.0;
    }
}

} // namespace

Mollifier::Mollifier(int moment_order, int samples_per_unit, double cutoff_radius)
    : moment_order_(moment_order), samples_per_unit_(samples_per_unit), radius_(cutoff_radius) {
    if (moment_order_ < 0) throw ConfigError("mollifier moment order must be >= 0");
    if (samples_per_unit_ < 4) throw ConfigError("mollifier needs >= 4 samples per unit");
    if (radius_ < 6.0) throw ConfigError("cutoff radius below 6 would bite into the profile");

    // Solve sum_j c_j G_{i+j} = delta_{i0} for the even polynomial p.
    const int n = moment_order_ + 1;
    const auto g = gaussian_moments(2 * n);
    std::vector<std::vector<double>> a(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                g[static_cast<std::size_t>(i + j)];
    const auto inv = invert(a);
    condition_ = norm1(a) * norm1(inv);
    if (condition_ > 1e12)
        throw ConstructionError("moment system too ill-conditioned (estimate " +
                                    std::to_string(condition_) + ") for moment order " +
                                    std::to_string(moment_order_),
                                condition_);

    poly_.assign(static_cast<std::size_t>(2 * moment_order_ + 1), 0.0);
    for (int j = 0; j < n; ++j)
        poly_[static_cast<std::size_t>(2 * j)] = inv[static_cast<std::size_t>(j)][0];

    // P_{j+1} = P_j' - 2 x P_j gives (p e^{-x^2})^{(j)} = P_j e^{-x^2}.
    deriv_polys_.push_back(poly_);
    for (int j = 0; j < max_derivative_order(); ++j) {
        const auto& p = deriv_polys_.back();
        std::vector<double> next(p.size() + 1, 0.0);
        for (std::size_t k = 1; k < p.size(); ++k) next[k - 1] += static_cast<double>(k) * p[k];
        for (std::size_t k = 0; k < p.size(); ++k) next[k + 1] -= 2.0 * p[k];
        deriv_polys_.push_back(std::move(next));
    }

    // Antiderivative: q' - 2 x q = p - gamma with gamma = (integral of p e^{-x^2}) / sqrt(pi),
    // which is 1/sqrt(pi) by the unit-mass constraint.
    gamma_ = 1.0 / kSqrtPi;
    const int deg = 2 * moment_order_;
    antideriv_poly_.assign(static_cast<std::size_t>(std::max(deg, 1)), 0.0);
    for (int k = deg; k >= 1; --k) {
        // coefficient of x^k in q' - 2xq: (k+1) b_{k+1} - 2 b_{k-1} = a_k
        const double ak = (k < static_cast<int>(poly_.size())) ? poly_[static_cast<std::size_t>(k)] : 0.0;
        const double bk1 = (k + 1 < static_cast<int>(antideriv_poly_.size()))
                               ? antideriv_poly_[static_cast<std::size_t>(k + 1)]
                               : 0.0;
        antideriv_poly_[static_cast<std::size_t>(k - 1)] = ((k + 1) * bk1 - ak) / 2.0;
    }

    // Sampled profile on [-R, R] plus measured moment defects.
    const auto count = static_cast<std::size_t>(2 * samples_per_unit_ * static_cast<int>(radius_)) + 1;
    const double h = 1.0 / samples_per_unit_;
    profile_ = GridFunction1D::sample(-radius_, h, count, [&](double x) { return value(x); });

    moment_defects_.assign(static_cast<std::size_t>(moment_order_) + 1, 0.0);
    for (int j = 0; j <= moment_order_; ++j) {
        GridFunction1D weighted = GridFunction1D::sample(
            -radius_, h, count, [&](double x) { return std::pow(x, j) * value(x); });
        moment_defects_[static_cast<std::size_t>(j)] = integral(weighted) - (j == 0 ? 1.0 : 0.0);
    }
    for (int j = 0; j <= moment_order_; ++j) {
        const double defect = std::abs(moment_defects_[static_cast<std::size_t>(j)]);
        if (defect > (j == 0 ? 1e-12 : 1e-10))
            throw ConstructionError("moment defect " + std::to_string(defect) +
                                        " at order " + std::to_string(j) +
                                        " exceeds tolerance",
                                    condition_);
    }
}

double Mollifier::cutoff_defect_bound() const {
    const double r = radius_ - 2.0;
    return std::exp(-r * r);
}

double Mollifier::cutoff(double x, int k) const {
    const double ax = std::abs(x);
    if (ax <= radius_ - 2.0) return k == 0 ? 1.0 : 0.0;
    if (ax >= radius_) return 0.0;
    const double u = (ax - (radius_ - 2.0)) / 2.0;
    double v = smoothstep_down(u, k) / std::pow(2.0, k);
    if (x < 0.0 && (k % 2) == 1) v = -v;
    return v;
}

double Mollifier::bare_derivative(double x, int j) const {
    return eval_poly(deriv_polys_[static_cast<std::size_t>(j)], x) * std::exp(-x * x);
}

double Mollifier::value(double x) const {
    if (std::abs(x) >= radius_) return 0.0;
    return bare_derivative(x, 0) * cutoff(x, 0);
}

double Mollifier::derivative(double x, int k) const {
    if (k < 0 || k > max_derivative_order())
        throw DomainError("mollifier derivative order " + std::to_string(k) + " unsupported");
    if (std::abs(x) >= radius_) return 0.0;
    if (std::abs(x) <= radius_ - 2.0) return bare_derivative(x, k);
    // Leibniz across the cutoff band.
    double sum = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= k; ++j) {
        sum += binom * bare_derivative(x, j) * cutoff(x, k - j);
        binom = binom * (k - j) / (j + 1.0);
    }
    return sum;
}

double Mollifier::antiderivative(double x) const {
    if (x <= -radius_) return 0.0;
    if (x >= radius_) return 1.0;
    return eval_poly(antideriv_poly_, x) * std::exp(-x * x) +
           gamma_ * kSqrtPi / 2.0 * (1.0 + std::erf(x));
}

double Mollifier::integral_of_square() const {
    // Simpson on a 4x refined sampling of the closed-form profile.
    const int per_unit = 4 * samples_per_unit_;
    const auto n = static_cast<std::size_t>(2 * per_unit * static_cast<int>(radius_));
    const double h = 1.0 / per_unit;
    double sum = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = -radius_ + static_cast<double>(i) * h;
        const double v = value(x) * value(x);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * v;
    }
    return sum * h / 3.0;
}

double Mollifier::integral_of_abs() const {
    const int per_unit = 8 * samples_per_unit_;
    const auto n = static_cast<std::size_t>(2 * per_unit * static_cast<int>(radius_));
    const double h = 1.0 / per_unit;
    double sum = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = -radius_ + static_cast<double>(i) * h;
        const double v = std::abs(value(x));
        sum += (i == 0 || i == n) ? 0.5 * v : v;
    }
    return sum * h;
}

double Mollifier::sup_abs() const { return sup_abs_derivative(0); }

double Mollifier::sup_abs_derivative(int k) const {
    const int per_unit = 8 * samples_per_unit_;
    const auto n = static_cast<std::size_t>(2 * per_unit * static_cast<int>(radius_));
    const double h = 1.0 / per_unit;
    double m = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
        m = std::max(m, std::abs(derivative(-radius_ + static_cast<double>(i) * h, k)));
    return m;
}

GridFunction1D scale(const Mollifier& phi, double eps, double x0, double h, std::size_t n,
                     int min_nodes_across) {
    if (!(eps > 0.0) || eps > 1.0) throw ResolutionError("scale parameter outside (0,1]");
    const double support = 2.0 * phi.cutoff_radius() * eps;
    if (support / h < static_cast<double>(min_nodes_across))
        throw ResolutionError("grid spacing " + std::to_string(h) + " cannot resolve eps = " +
                              std::to_string(eps) + ": fewer than " +
                              std::to_string(min_nodes_across) + " nodes across the support");
    return GridFunction1D::sample(x0, h, n,
                                  [&](double x) { return phi.value(x / eps) / eps; });
}

const Mollifier& default_mollifier() {
    static const Mollifier phi(2, 64);
    return phi;
}

} // namespace gflab
