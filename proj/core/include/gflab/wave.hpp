#pragma once
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "gflab/family.hpp"
#include "gflab/grid.hpp"
#include "gflab/nonlinearity.hpp"

namespace gflab {

struct PicardSettings {
    double tol = 1e-12; // relative sup-change stopping threshold
    int max_iter = 200;
};

/// Successive sup-distances of one Picard run on one time slab.
struct SlabLog {
    std::size_t first_row = 0;
    std::size_t last_row = 0;
    int sweeps = 0;
    double contraction_bound = 0.0; // Lip_f * (slab height)^2
    std::vector<double> sup_changes;
};

struct IterationLog {
    std::vector<SlabLog> slabs;
    int total_sweeps() const;
    /// Largest ratio of consecutive sup-changes while both sit above floor.
    double max_contraction_ratio(double floor = 1e-13) const;
};

struct WaveProblem {
    GridFunction1D a;
    GridFunction1D b;
    std::optional<GridFunction2D> source; // empty means zero right-hand side
    NonlinearitySpec f = NonlinearitySpec::zero();
    Trapezoid region;
};

struct PicardResult {
    GridFunction2D solution;
    IterationLog log;
};

/// Geometry of the solver-aligned data line: initial data must be sampled
/// on this grid so characteristic lookups stay pure index arithmetic. The
/// rectangle carries `pad` extra cells beyond the region on every side so
/// derivative stencils of order <= pad remain valid on region nodes.
struct DataGeometry {
    double x0 = 0.0;
    double h = 1.0;
    std::size_t n = 0;
    Interval extent() const { return {x0, x0 + static_cast<double>(n - 1) * h}; }
};

inline constexpr std::size_t kSolverPad = 4;

DataGeometry solver_data_geometry(const Trapezoid& region, double h,
                                  std::size_t pad = kSolverPad);
GridFunction1D sample_solver_data(const std::function<double(double)>& f,
                                  const Trapezoid& region, double h,
                                  std::size_t pad = kSolverPad);
/// Source grid covering the full dependence wedge of the padded rectangle.
GridFunction2D sample_solver_source(const std::function<double(double, double)>& f,
                                    const Trapezoid& region, double h,
                                    std::size_t pad = kSolverPad);

/// Solid light-cone indicator |x| <= |t|; nodes exactly on the cone carry
/// half weight.
double cone_indicator(double x, double t, double tol = 1e-12);

/// w(x,t) = (a(x-t)+a(x+t))/2 + (1/2) int_{x-t}^{x+t} b
///        + (1/2) double integral of the source over the backward triangle.
/// Data lookups are exact on the characteristic grid; the antiderivative of
/// b is accumulated once and the triangle integral accumulates per time
/// level. Returns the padded rectangle around the region.
GridFunction2D dalembert_linear(const GridFunction1D& a, const GridFunction1D& b,
                                const std::optional<GridFunction2D>& source,
                                const Trapezoid& region);

/// Fixed point of u -> dalembert_linear(a, b, f(u) + source). Time-marches
/// over sub-trapezoids with Lip_f * T'^2 <= 1/2 when the whole region would
/// not contract; slabs chain initial data through the solution and a
/// Richardson-refined one-sided time derivative.
PicardResult picard_semilinear(const WaveProblem& p, const PicardSettings& s);

/// Member-wise picard_semilinear; member errors are annotated with their
/// ladder index.
Family2D solve_family(const Family1D& a, const Family1D& b,
                      const std::optional<Family2D>& source, const NonlinearitySpec& f,
                      const Trapezoid& region, const PicardSettings& s,
                      int parallelism = 1);

struct ReferenceMode {
    enum class Kind { BoundedF, LinearSource };
    Kind kind = Kind::BoundedF;
    double value = 0.0; // plateau height m, or source strength L

    static ReferenceMode bounded_f(double m) { return {Kind::BoundedF, m}; }
    static ReferenceMode linear_source(double L) { return {Kind::LinearSource, L}; }
};

/// Reference problem with data (r0, r1): either the semilinear equation
/// driven by f(m 1_Sigma + w) (f must be bounded) or the linear problem
/// with source L 1_Sigma.
PicardResult solve_reference_w(const GridFunction1D& r0, const GridFunction1D& r1,
                               const ReferenceMode& mode, const NonlinearitySpec& f,
                               const Trapezoid& region, const PicardSettings& s);

/// General piecewise-constant-plateau problem: source f(plateau(x,t) + w)
/// with zero or given data.
PicardResult solve_with_plateau(const GridFunction1D& r0, const GridFunction1D& r1,
                                const std::function<double(double, double)>& plateau,
                                const NonlinearitySpec& f, const Trapezoid& region,
                                const PicardSettings& s);

/// Sup over region nodes of u - (linear part + triangle integral of
/// f(u)+source), re-evaluated from the original data. Direct fixed-point
/// re-substitution check.
double integral_equation_residual(const WaveProblem& p, const GridFunction2D& u);

} // namespace gflab
