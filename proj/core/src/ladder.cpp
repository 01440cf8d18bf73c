#include "gflab/ladder.hpp"

#include <cmath>
#include <string>

#include "gflab/errors.hpp"

namespace gflab {

EpsilonLadder::EpsilonLadder(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 4)
        throw ConfigError("epsilon ladder needs at least 4 values, got " +
                          std::to_string(values_.size()));
    double prev = 2.0;
    for (double e : values_) {
        if (!(e > 0.0) || e > 1.0)
            throw ConfigError("ladder value " + std::to_string(e) + " outside (0,1]");
        if (!(e < prev))
            throw ConfigError("ladder values must be strictly decreasing");
        prev = e;
    }
}

EpsilonLadder make_ladder(double eps0, double ratio, int count) {
    if (!(eps0 > 0.0) || eps0 > 1.0)
        throw ConfigError("eps0 must lie in (0,1], got " + std::to_string(eps0));
    if (!(ratio > 0.0) || !(ratio < 1.0))
        throw ConfigError("ladder ratio must lie in (0,1), got " + std::to_string(ratio));
    if (count < 4)
        throw ConfigError("ladder count must be >= 4, got " + std::to_string(count));
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = eps0 * std::pow(ratio, k);
    return EpsilonLadder(std::move(v));
}

} // namespace gflab
