#pragma once
#include <cstddef>
#include <vector>

#include "gflab/grid.hpp"

namespace gflab {

/// Even mollifier phi(x) = p(x) exp(-x^2) chi(x) with unit integral and
/// vanishing moments 1..m. The even polynomial p solves the Gaussian moment
/// system exactly; chi is a C^2 quintic-spline cutoff equal to one on
/// [-(R-2), R-2] and zero outside [-R, R]. The profile is kept in closed
/// form so scaled copies, derivatives and the antiderivative can be
/// evaluated at arbitrary points; a sampled profile and the residual
/// moment defects are recorded at construction.
class Mollifier {
public:
    Mollifier(int moment_order, int samples_per_unit, double cutoff_radius = 10.0);

    int moment_order() const { return moment_order_; }
    double cutoff_radius() const { return radius_; }
    int samples_per_unit() const { return samples_per_unit_; }
    const GridFunction1D& profile() const { return profile_; }
    /// Residual of moment j (entry 0 holds integral minus one), measured by
    /// quadrature on the sampled profile.
    const std::vector<double>& moment_defects() const { return moment_defects_; }
    /// Loss of mass from cutting the Gaussian tail at |x| = R.
    double cutoff_defect_bound() const;
    double moment_system_condition() const { return condition_; }

    double value(double x) const;
    /// k-th derivative, k <= max_derivative_order().
    double derivative(double x, int k) const;
    static int max_derivative_order() { return 8; }
    /// Antiderivative from -infinity; approaches 1 at +infinity.
    double antiderivative(double x) const;

    /// Oracle-grade quadratures on a refined sampling of the profile.
    double integral_of_square() const;
    double integral_of_abs() const;
    double sup_abs() const;
    double sup_abs_derivative(int k) const;

private:
    int moment_order_;
    int samples_per_unit_;
    double radius_;
    double condition_ = 1.0;
    std::vector<double> poly_;                      // p, coefficient k is x^k
    std::vector<std::vector<double>> deriv_polys_;  // P_j with (P e^{-x^2})^(j) = P_j e^{-x^2}
    std::vector<double> antideriv_poly_;            // q with d/dx[q e^{-x^2}] = p - gamma
    double gamma_ = 0.0;                            // erf coefficient of the antiderivative
    GridFunction1D profile_;
    std::vector<double> moment_defects_;

    double cutoff(double x, int k) const; // k-th derivative of chi
    double bare_derivative(double x, int j) const; // (p e^{-x^2})^(j), no cutoff
};

/// Samples eps^{-1} phi(x/eps) on the given grid. Throws ResolutionError
/// when fewer than min_nodes_across nodes fall across the scaled support.
GridFunction1D scale(const Mollifier& phi, double eps, double x0, double h, std::size_t n,
                     int min_nodes_across = 8);

/// The mollifier used when none is configured explicitly (m = 2, 64 samples
/// per unit).
const Mollifier& default_mollifier();

} // namespace gflab
