#pragma once
#include <cstddef>
#include <vector>

namespace gflab {

/// Finite decreasing sequence of regularization parameters in (0,1].
/// Every family in the library is sampled on one of these. At least four
/// entries are required so order regressions are meaningful.
class EpsilonLadder {
public:
    explicit EpsilonLadder(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }
    double front() const { return values_.front(); } // largest epsilon
    double back() const { return values_.back(); }   // smallest epsilon

    bool operator==(const EpsilonLadder&) const = default;

private:
    std::vector<double> values_;
};

/// Geometric ladder eps0 * ratio^k, k = 0..count-1.
EpsilonLadder make_ladder(double eps0, double ratio, int count);

} // namespace gflab
