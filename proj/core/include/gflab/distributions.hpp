#pragma once
#include <optional>
#include <string>
#include <vector>

#include "gflab/family.hpp"
#include "gflab/grid.hpp"
#include "gflab/ladder.hpp"
#include "gflab/mollifier.hpp"

namespace gflab {

/// One primitive summand of a distribution: a point mass / derivative, a
/// Heaviside step, a tabulated locally integrable density, or a named
/// function. A spec is a finite linear combination of these.
struct DistributionAtom {
    // DeltaSquared is the pointwise square of the imbedded delta: not a
    // distribution, but a perfectly good representative family, used as
    // singular velocity data.
    enum class Kind { Delta, DeltaDerivative, DeltaSquared, Heaviside, SampledL1, Function };
    enum class FunctionId { Sin, Cos, Hat, Zero };

    Kind kind = Kind::Delta;
    double coefficient = 1.0;
    double position = 0.0;              // x0 for delta/heaviside/hat-style atoms
    int derivative_order = 1;           // delta-derivative only
    FunctionId function = FunctionId::Zero;
    GridFunction1D density;             // sampled_L1 only; linearly interpolated
};

class DistributionSpec {
public:
    DistributionSpec() = default;
    explicit DistributionSpec(std::vector<DistributionAtom> atoms) : atoms_(std::move(atoms)) {}

    static DistributionSpec zero();
    static DistributionSpec delta(double x0, double coefficient = 1.0);
    static DistributionSpec delta_squared(double x0, double coefficient = 1.0);
    static DistributionSpec delta_derivative(double x0, int order, double coefficient = 1.0);
    static DistributionSpec heaviside(double x0, double coefficient = 1.0);
    static DistributionSpec sampled_l1(GridFunction1D density, double coefficient = 1.0);
    static DistributionSpec function(DistributionAtom::FunctionId id, double coefficient = 1.0);
    DistributionSpec plus(const DistributionSpec& other) const;

    const std::vector<DistributionAtom>& atoms() const { return atoms_; }
    bool is_zero() const { return atoms_.empty(); }

    /// Convolution with the scaled mollifier, evaluated at one point.
    double imbedded_value(double x, double eps, const Mollifier& phi) const;
    /// Pointwise value of the unregularized object; only defined when no
    /// delta-type atoms are present (Heaviside uses the midpoint convention).
    double sharp_value(double x) const;
    bool has_pointwise_values() const;

    /// Point masses carried by the measure part: (position, coefficient)
    /// of each order-zero delta atom.
    std::vector<std::pair<double, double>> measure_parts() const;
    std::vector<double> singular_support() const;
    std::string describe() const;

private:
    std::vector<DistributionAtom> atoms_;
};

/// Member eps: (d * phi_eps) sampled on a per-rung grid covering the
/// interval with spacing eps / points_per_eps.
Family1D imbed(const DistributionSpec& d, const EpsilonLadder& ladder, const Mollifier& phi,
               const Interval& interval, int points_per_eps);

} // namespace gflab
