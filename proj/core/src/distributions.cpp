#include "gflab/distributions.hpp"

#include <cmath>
#include <utility>

#include "gflab/errors.hpp"

namespace gflab {
namespace {

double eval_function(DistributionAtom::FunctionId id, double x, double position) {
    switch (id) {
        case DistributionAtom::FunctionId::Sin: return std::sin(x);
        case DistributionAtom::FunctionId::Cos: return std::cos(x);
        case DistributionAtom::FunctionId::Hat: return std::max(0.0, 1.0 - std::abs(x - position));
        case DistributionAtom::FunctionId::Zero: return 0.0;
    }
    return 0.0;
}

// Trapezoid quadrature of f(x - eps*y) phi(y) over the mollifier support,
// at the profile's own sampling resolution.
double convolve_function(const DistributionAtom& atom, double x, double eps,
                         const Mollifier& phi) {
    const auto& prof = phi.profile();
    double sum = 0.0;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const double w = (i == 0 || i + 1 == prof.size()) ? 0.5 : 1.0;
        sum += w * prof[i] * eval_function(atom.function, x - eps * prof.x(i), atom.position);
    }
    return sum * prof.spacing();
}

double convolve_density(const DistributionAtom& atom, double x, double eps,
                        const Mollifier& phi) {
    const auto& rho = atom.density;
    const double reach = phi.cutoff_radius() * eps;
    double sum = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double y = rho.x(i);
        if (std::abs(x - y) > reach) continue;
        const double w = (i == 0 || i + 1 == rho.size()) ? 0.5 : 1.0;
        sum += w * rho[i] * phi.value((x - y) / eps) / eps;
    }
    return sum * rho.spacing();
}

} // namespace

DistributionSpec DistributionSpec::zero() { return DistributionSpec(); }

DistributionSpec DistributionSpec::delta(double x0, double coefficient) {
    DistributionAtom a;
    a.kind = DistributionAtom::Kind::Delta;
    a.position = x0;
    a.coefficient = coefficient;
    return DistributionSpec({a});
}

DistributionSpec DistributionSpec::delta_squared(double x0, double coefficient) {
    DistributionAtom a;
    a.kind = DistributionAtom::Kind::DeltaSquared;
    a.position = x0;
    a.coefficient = coefficient;
    return DistributionSpec({a});
}

DistributionSpec DistributionSpec::delta_derivative(double x0, int order, double coefficient) {
    if (order < 1 || order > Mollifier::max_derivative_order() - 1)
        throw ConfigError("delta derivative order out of range");
    DistributionAtom a;
    a.kind = DistributionAtom::Kind::DeltaDerivative;
    a.position = x0;
    a.derivative_order = order;
    a.coefficient = coefficient;
    return DistributionSpec({a});
}

DistributionSpec DistributionSpec::heaviside(double x0, double coefficient) {
    DistributionAtom a;
    a.kind = DistributionAtom::Kind::Heaviside;
    a.position = x0;
    a.coefficient = coefficient;
    return DistributionSpec({a});
}

DistributionSpec DistributionSpec::sampled_l1(GridFunction1D density, double coefficient) {
    DistributionAtom a;
    a.kind = DistributionAtom::Kind::SampledL1;
    a.density = std::move(density);
    a.coefficient = coefficient;
    return DistributionSpec({a});
}

DistributionSpec DistributionSpec::function(DistributionAtom::FunctionId id, double coefficient) {
    DistributionAtom a;
    a.kind = DistributionAtom::Kind::Function;
    a.function = id;
    a.coefficient = coefficient;
    return DistributionSpec({a});
}

DistributionSpec DistributionSpec::plus(const DistributionSpec& other) const {
    std::vector<DistributionAtom> all = atoms_;
    all.insert(all.end(), other.atoms_.begin(), other.atoms_.end());
    return DistributionSpec(std::move(all));
}

double DistributionSpec::imbedded_value(double x, double eps, const Mollifier& phi) const {
    double sum = 0.0;
    for (const auto& a : atoms_) {
        switch (a.kind) {
            case DistributionAtom::Kind::Delta:
                sum += a.coefficient * phi.value((x - a.position) / eps) / eps;
                break;
            case DistributionAtom::Kind::DeltaDerivative:
                sum += a.coefficient *
                       phi.derivative((x - a.position) / eps, a.derivative_order) /
                       std::pow(eps, 1 + a.derivative_order);
                break;
            case DistributionAtom::Kind::DeltaSquared: {
                const double v = phi.value((x - a.position) / eps) / eps;
                sum += a.coefficient * v * v;
                break;
            }
            case DistributionAtom::Kind::Heaviside:
                sum += a.coefficient * phi.antiderivative((x - a.position) / eps);
                break;
            case DistributionAtom::Kind::SampledL1:
                sum += a.coefficient * convolve_density(a, x, eps, phi);
                break;
            case DistributionAtom::Kind::Function:
                sum += a.coefficient * convolve_function(a, x, eps, phi);
                break;
        }
    }
    return sum;
}

double DistributionSpec::sharp_value(double x) const {
    double sum = 0.0;
    for (const auto& a : atoms_) {
        switch (a.kind) {
            case DistributionAtom::Kind::Delta:
            case DistributionAtom::Kind::DeltaDerivative:
            case DistributionAtom::Kind::DeltaSquared:
                throw DomainError("point masses have no pointwise values");
            case DistributionAtom::Kind::Heaviside: {
                const double d = x - a.position;
                sum += a.coefficient * (d > 0.0 ? 1.0 : (d == 0.0 ? 0.5 : 0.0));
                break;
            }
            case DistributionAtom::Kind::SampledL1: {
                const auto ext = a.density.extent();
                if (x >= ext.lo && x <= ext.hi) sum += a.coefficient * a.density.interpolate(x);
                break;
            }
            case DistributionAtom::Kind::Function:
                sum += a.coefficient * eval_function(a.function, x, a.position);
                break;
        }
    }
    return sum;
}

bool DistributionSpec::has_pointwise_values() const {
    for (const auto& a : atoms_)
        if (a.kind == DistributionAtom::Kind::Delta ||
            a.kind == DistributionAtom::Kind::DeltaDerivative ||
            a.kind == DistributionAtom::Kind::DeltaSquared)
            return false;
    return true;
}

std::vector<std::pair<double, double>> DistributionSpec::measure_parts() const {
    std::vector<std::pair<double, double>> parts;
    for (const auto& a : atoms_)
        if (a.kind == DistributionAtom::Kind::Delta)
            parts.emplace_back(a.position, a.coefficient);
    return parts;
}

std::vector<double> DistributionSpec::singular_support() const {
    std::vector<double> pts;
    for (const auto& a : atoms_)
        if (a.kind == DistributionAtom::Kind::Delta ||
            a.kind == DistributionAtom::Kind::DeltaDerivative ||
            a.kind == DistributionAtom::Kind::DeltaSquared)
            pts.push_back(a.position);
    return pts;
}

std::string DistributionSpec::describe() const {
    if (atoms_.empty()) return "0";
    std::string s;
    for (const auto& a : atoms_) {
        if (!s.empty()) s += " + ";
        s += std::to_string(a.coefficient) + "*";
        switch (a.kind) {
            case DistributionAtom::Kind::Delta: s += "delta(" + std::to_string(a.position) + ")"; break;
            case DistributionAtom::Kind::DeltaDerivative:
                s += "delta^(" + std::to_string(a.derivative_order) + ")(" +
                     std::to_string(a.position) + ")";
                break;
            case DistributionAtom::Kind::DeltaSquared:
                s += "delta^2(" + std::to_string(a.position) + ")";
                break;
            case DistributionAtom::Kind::Heaviside: s += "H(" + std::to_string(a.position) + ")"; break;
            case DistributionAtom::Kind::SampledL1: s += "sampled"; break;
            case DistributionAtom::Kind::Function:
                switch (a.function) {
                    case DistributionAtom::FunctionId::Sin: s += "sin"; break;
                    case DistributionAtom::FunctionId::Cos: s += "cos"; break;
                    case DistributionAtom::FunctionId::Hat: s += "hat"; break;
                    case DistributionAtom::FunctionId::Zero: s += "0"; break;
                }
                break;
        }
    }
    return s;
}

Family1D imbed(const DistributionSpec& d, const EpsilonLadder& ladder, const Mollifier& phi,
               const Interval& interval, int points_per_eps) {
    if (points_per_eps < 2) throw ConfigError("points_per_eps must be >= 2");
    std::vector<GridFunction1D> members;
    members.reserve(ladder.size());
    for (double eps : ladder.values()) {
        const double h = eps / points_per_eps;
        const auto n = static_cast<std::size_t>(std::ceil(interval.length() / h - 1e-9)) + 1;
        if (2.0 * phi.cutoff_radius() * eps / h < static_cast<double>(points_per_eps))
            throw ResolutionError("member grid cannot resolve eps = " + std::to_string(eps));
        members.push_back(GridFunction1D::sample(
            interval.lo, h, n, [&](double x) { return d.imbedded_value(x, eps, phi); }));
    }
    return Family1D(ladder, std::move(members), Provenance::Imbedded);
}

} // namespace gflab
