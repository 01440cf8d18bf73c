#pragma once
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "gflab/errors.hpp"
#include "gflab/grid.hpp"
#include "gflab/ladder.hpp"
#include "gflab/nonlinearity.hpp"

namespace gflab {

enum class Provenance { Imbedded, Solved, Derived };

/// Epsilon-indexed family of grid functions: the concrete stand-in for a
/// generalized-function representative. One member per ladder value; all
/// members share the physical extent but may carry their own spacing.
template <class Grid>
class RepresentativeFamily {
public:
    RepresentativeFamily(EpsilonLadder ladder, std::vector<Grid> members,
                         Provenance provenance)
        : ladder_(std::move(ladder)), members_(std::move(members)), provenance_(provenance) {
        if (members_.size() != ladder_.size())
            throw DomainError("family needs exactly one member per ladder value");
    }

    const EpsilonLadder& ladder() const { return ladder_; }
    const std::vector<Grid>& members() const { return members_; }
    const Grid& member(std::size_t k) const { return members_[k]; }
    double epsilon(std::size_t k) const { return ladder_[k]; }
    std::size_t size() const { return members_.size(); }
    Provenance provenance() const { return provenance_; }

private:
    EpsilonLadder ladder_;
    std::vector<Grid> members_;
    Provenance provenance_;
};

using Family1D = RepresentativeFamily<GridFunction1D>;
using Family2D = RepresentativeFamily<GridFunction2D>;

/// Member-wise superposition f(u_eps).
template <class Grid>
RepresentativeFamily<Grid> pointwise_apply(const NonlinearitySpec& f,
                                           const RepresentativeFamily<Grid>& u) {
    std::vector<Grid> members;
    members.reserve(u.size());
    for (const auto& g : u.members())
        members.push_back(g.map([&](double v) { return f(v); }));
    return RepresentativeFamily<Grid>(u.ladder(), std::move(members), Provenance::Derived);
}

/// Member-wise product; members must agree in geometry rung by rung.
template <class Grid>
RepresentativeFamily<Grid> pointwise_product(const RepresentativeFamily<Grid>& u,
                                             const RepresentativeFamily<Grid>& v) {
    if (u.ladder() != v.ladder()) throw DomainError("family ladders differ");
    std::vector<Grid> members;
    members.reserve(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        members.push_back(zip(u.member(k), v.member(k),
                              [](double a, double b) { return a * b; }));
    return RepresentativeFamily<Grid>(u.ladder(), std::move(members), Provenance::Derived);
}

template <class Grid>
RepresentativeFamily<Grid> pointwise_sum(const RepresentativeFamily<Grid>& u,
                                         const RepresentativeFamily<Grid>& v) {
    if (u.ladder() != v.ladder()) throw DomainError("family ladders differ");
    std::vector<Grid> members;
    members.reserve(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        members.push_back(zip(u.member(k), v.member(k),
                              [](double a, double b) { return a + b; }));
    return RepresentativeFamily<Grid>(u.ladder(), std::move(members), Provenance::Derived);
}

/// Epsilon-indexed family of complex numbers (generalized scalar).
class GeneralizedScalar {
public:
    GeneralizedScalar(EpsilonLadder ladder, std::vector<std::complex<double>> values)
        : ladder_(std::move(ladder)), values_(std::move(values)) {
        if (values_.size() != ladder_.size())
            throw DomainError("generalized scalar needs one value per ladder entry");
    }

    const EpsilonLadder& ladder() const { return ladder_; }
    const std::vector<std::complex<double>>& values() const { return values_; }
    std::complex<double> value(std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }

private:
    EpsilonLadder ladder_;
    std::vector<std::complex<double>> values_;
};

} // namespace gflab
