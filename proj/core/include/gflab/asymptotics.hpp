#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gflab/derivatives.hpp"
#include "gflab/family.hpp"
#include "gflab/grid.hpp"

namespace gflab {

/// Norms below this value are treated as identically zero when fitting
/// epsilon orders.
inline constexpr double kNormFloor = 1e-13;

/// Least-squares line of log(norm) against log(1/eps). slope = p means the
/// norms behave like eps^{-p}: positive slopes are growth orders, negative
/// slopes decay orders.
struct AsymptoticFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
    std::vector<std::pair<double, double>> points; // (eps, norm)
    bool identically_zero = false;

    double decay_order() const { return -slope; }
};

AsymptoticFit fit_order(const std::vector<std::pair<double, double>>& norms_per_eps);

struct ClassificationSettings {
    int max_order = 3;          // derivatives tested up to this total order
    double q_max = 5.0;         // negligibility certified up to this order
    double order_tolerance = 0.3;
    double slope_slack = 0.2;   // slack on decay-order assertions
    double moderate_cap = 20.0; // growth order beyond which a fit is flagged non-moderate
};

enum class CellVerdict { Ginf, Negligible, ModerateNotGinf, NonModerate };
std::string to_string(CellVerdict v);

/// Per-derivative growth order table for one family over one region.
struct ModerateReport {
    struct Entry {
        MultiIndex alpha;
        AsymptoticFit fit;
    };
    std::vector<Entry> entries;
    bool identically_zero = false;

    const AsymptoticFit* fit_for(const MultiIndex& alpha) const;
};

ModerateReport classify_moderate(const Family2D& u, const Trapezoid& region, int max_order);
ModerateReport classify_moderate(const Family1D& u, const Interval& region, int max_order);

struct NegligibilityVerdict {
    bool negligible = false;
    double q_max = 0.0;
    bool below_floor = false; // all norms under the absolute floor
    ModerateReport fits;
};

NegligibilityVerdict classify_negligible(const Family2D& u, const Trapezoid& region,
                                         const ClassificationSettings& settings);
NegligibilityVerdict classify_negligible(const Family1D& u, const Interval& region,
                                         const ClassificationSettings& settings);

/// Square-cell classification of a solution family over a trapezoid. Cell
/// interiors are shrunk by one member spacing before taking sups so
/// derivative stencils do not bleed across cell edges.
struct RegularityReport {
    struct Cell {
        std::size_t ix = 0, it = 0;
        double x_lo = 0.0, x_hi = 0.0, t_lo = 0.0, t_hi = 0.0;
        CellVerdict verdict = CellVerdict::Ginf;
        double ginf_order = 0.0; // growth order p for Ginf cells
        ModerateReport orders;
        std::string label() const;
        double distance_to_cone() const; // Euclidean distance to |x| = |t|
    };
    double cell_side = 0.0;
    ClassificationSettings settings;
    std::vector<Cell> cells;

    bool flagged(const Cell& c) const {
        return c.verdict == CellVerdict::ModerateNotGinf ||
               c.verdict == CellVerdict::NonModerate;
    }
};

RegularityReport ginf_report(const Family2D& u, const Trapezoid& region, double cell_side,
                             const ClassificationSettings& settings);

/// Compactly supported smooth bump exp(1 - 1/(1-s^2)), s = (x-center)/width.
struct TestFunctionSpec {
    std::string name;
    double center = 0.0;
    double width = 1.0;
    double center_t = 0.0; // 2D pairings use a product bump
    double width_t = 1.0;

    double value1d(double x) const;
    double value2d(double x, double t) const;
};

struct AssociationVerdict {
    struct Entry {
        TestFunctionSpec test;
        std::vector<std::pair<double, double>> pairings; // (eps, pairing)
        bool converged = false;
        double limit = 0.0;
    };
    std::vector<Entry> entries;
    bool all_converged() const;
};

AssociationVerdict weak_limit(const Family1D& u, const std::vector<TestFunctionSpec>& tests);
AssociationVerdict weak_limit(const Family2D& u, const Trapezoid& region,
                              const std::vector<TestFunctionSpec>& tests);

/// Convergence of representatives in integrated absolute value. Members are
/// resampled to the coarsest member grid by node injection; the pairwise
/// distances over the ladder then certify (or refute) a Cauchy tail.
struct L1LimitReport {
    bool converged = false;
    std::vector<double> pairwise_distances; // consecutive ladder pairs
    AsymptoticFit distance_fit;             // fitted on pair midpoint epsilons
    std::size_t limit_index = 0;            // finest member
};

L1LimitReport l1g_limit(const Family1D& u, const Interval& region);
L1LimitReport l1g_limit(const Family2D& u, const Trapezoid& region);

/// Resample to the grid of the coarsest member by picking the nearest node
/// of the finer grid (grids share their origin up to an integer number of
/// fine cells).
GridFunction1D resample_to_coarsest(const GridFunction1D& fine, const GridFunction1D& coarse);
GridFunction2D resample_to_coarsest(const GridFunction2D& fine, const GridFunction2D& coarse);

} // namespace gflab
