#pragma once
#include <optional>
#include <string>

namespace gflab {

/// Right-hand-side nonlinearity drawn from a fixed catalog. Every entry
/// satisfies f(0) = 0 and a global Lipschitz estimate; boundedness and the
/// limit at infinity are recorded so scenario hypotheses can be validated
/// without sampling.
class NonlinearitySpec {
public:
    enum class Id { Zero, Linear, Sine, Squash, OddSquash };

    static NonlinearitySpec zero();
    static NonlinearitySpec linear(double k);
    static NonlinearitySpec sine(double amplitude);
    /// L * u^2 / (1 + u^2); bounded with limit L at both infinities.
    static NonlinearitySpec squash(double L);
    /// L * u / (1 + u^2); bounded odd map with limit 0 at both infinities.
    static NonlinearitySpec odd_squash(double L);
    static NonlinearitySpec from_name(const std::string& name, double parameter);

    double operator()(double u) const;

    Id id() const { return id_; }
    double parameter() const { return param_; }
    std::string name() const;

    double lipschitz_bound() const { return lipschitz_; }
    /// sup |f|; infinity for unbounded entries.
    double sup_bound() const { return sup_; }
    bool bounded() const;
    /// Common limit of f at +/- infinity, when one exists.
    std::optional<double> limit_at_infinity() const { return limit_; }
    bool fixes_zero() const { return true; }

private:
    NonlinearitySpec(Id id, double param, double lipschitz, double sup,
                     std::optional<double> limit);
    void check_metadata_by_sampling() const;

    Id id_;
    double param_;
    double lipschitz_;
    double sup_;
    std::optional<double> limit_;
};

} // namespace gflab
