#include "gflab/nonlinearity.hpp"

#include <cmath>
#include <limits>

#include "gflab/errors.hpp"

namespace gflab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NonlinearitySpec::NonlinearitySpec(Id id, double param, double lipschitz, double sup,
                                   std::optional<double> limit)
    : id_(id), param_(param), lipschitz_(lipschitz), sup_(sup), limit_(limit) {
    if (!std::isfinite(lipschitz_))
        throw ConfigError("nonlinearity must have a finite Lipschitz bound");
    check_metadata_by_sampling();
}

NonlinearitySpec NonlinearitySpec::zero() {
    return NonlinearitySpec(Id::Zero, 0.0, 0.0, 0.0, 0.0);
}

NonlinearitySpec NonlinearitySpec::linear(double k) {
    return NonlinearitySpec(Id::Linear, k, std::abs(k), k == 0.0 ? 0.0 : kInf,
                            std::nullopt);
}

NonlinearitySpec NonlinearitySpec::sine(double amplitude) {
    return NonlinearitySpec(Id::Sine, amplitude, std::abs(amplitude), std::abs(amplitude),
                            std::nullopt);
}

NonlinearitySpec NonlinearitySpec::squash(double L) {
    // f' = 2Lu/(1+u^2)^2 peaks at u = 1/sqrt(3).
    return NonlinearitySpec(Id::Squash, L, std::abs(L) * 3.0 * std::sqrt(3.0) / 8.0,
                            std::abs(L), L);
}

NonlinearitySpec NonlinearitySpec::odd_squash(double L) {
    return NonlinearitySpec(Id::OddSquash, L, std::abs(L), std::abs(L) / 2.0, 0.0);
}

NonlinearitySpec NonlinearitySpec::from_name(const std::string& name, double parameter) {
    if (name == "zero") return zero();
    if (name == "linear") return linear(parameter);
    if (name == "sine") return sine(parameter);
    if (name == "squash") return squash(parameter);
    if (name == "odd_squash") return odd_squash(parameter);
    throw ConfigError("unknown nonlinearity id '" + name + "'");
}

double NonlinearitySpec::operator()(double u) const {
    switch (id_) {
        case Id::Zero: return 0.0;
        case Id::Linear: return param_ * u;
        case Id::Sine: return param_ * std::sin(u);
        case Id::Squash: return param_ * u * u / (1.0 + u * u);
        case Id::OddSquash: return param_ * u / (1.0 + u * u);
    }
    return 0.0;
}

std::string NonlinearitySpec::name() const {
    switch (id_) {
        case Id::Zero: return "zero";
        case Id::Linear: return "linear";
        case Id::Sine: return "sine";
        case Id::Squash: return "squash";
        case Id::OddSquash: return "odd_squash";
    }
    return "?";
}

bool NonlinearitySpec::bounded() const { return std::isfinite(sup_); }

void NonlinearitySpec::check_metadata_by_sampling() const {
    const auto& f = *this;
    if (f(0.0) != 0.0) throw ConfigError("catalog nonlinearity must satisfy f(0) = 0");
    const int n = 2000;
    const double lo = -50.0, hi = 50.0, du = (hi - lo) / n;
    double prev_u = lo, prev_f = f(lo);
    for (int i = 1; i <= n; ++i) {
        const double u = lo + i * du;
        const double fu = f(u);
        if (std::abs(fu - prev_f) > lipschitz_ * std::abs(u - prev_u) * (1.0 + 1e-9))
            throw ConfigError("recorded Lipschitz bound violated by sampling for " + name());
        if (bounded() && std::abs(fu) > sup_ * (1.0 + 1e-9))
            throw ConfigError("recorded sup bound violated by sampling for " + name());
        prev_u = u;
        prev_f = fu;
    }
}

} // namespace gflab
