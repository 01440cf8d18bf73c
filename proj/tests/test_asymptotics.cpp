#include <cmath>
#include <vector>

#include "doctest.h"
#include "gflab/asymptotics.hpp"
#include "gflab/distributions.hpp"
#include "gflab/errors.hpp"
#include "gflab/ladder.hpp"
#include "gflab/mollifier.hpp"
#include "gflab/norms.hpp"
#include "gflab/wave.hpp"
#include "test_support.hpp"

using namespace gflab;
namespace ts = testing_support;

namespace {

Family1D powers_family(const EpsilonLadder& ladder, double exponent) {
    std::vector<GridFunction1D> members;
    for (double eps : ladder.values())
        members.push_back(GridFunction1D::sample(
            -2.0, 1.0 / 64.0, 257,
            [&](double x) { return std::pow(eps, exponent) * std::sin(x); }));
    return Family1D(ladder, members, Provenance::Derived);
}

} // namespace

TEST_CASE("fit_order recovers exact powers") {
    const auto ladder = make_ladder(0.5, 0.5, 6);
    std::vector<std::pair<double, double>> growth, constant, decay;
    for (double eps : ladder.values()) {
        growth.push_back({eps, 1.0 / eps});
        constant.push_back({eps, 3.7});
        decay.push_back({eps, eps * eps});
    }
    const auto g = fit_order(growth);
    CHECK(g.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.r2 == doctest::Approx(1.0));
    const auto c = fit_order(constant);
    CHECK(c.slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(c.r2 == doctest::Approx(1.0));
    const auto d = fit_order(decay);
    CHECK(d.slope == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("fit_order is invariant under norm rescaling") {
    const auto ladder = make_ladder(0.25, 0.6, 6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::pair<double, double>> base, scaled;
        const double c = std::exp(ts::uniform(-3.0, 3.0));
        for (double eps : ladder.values()) {
            const double n = std::exp(ts::uniform(-2.0, 2.0));
            base.push_back({eps, n});
            scaled.push_back({eps, c * n});
        }
        const auto f1 = fit_order(base);
        const auto f2 = fit_order(scaled);
        CHECK(f1.slope == doctest::Approx(f2.slope).epsilon(1e-10));
        CHECK(f2.intercept - f1.intercept == doctest::Approx(std::log(c)).epsilon(1e-10));
    }
}

TEST_CASE("fit_order wants four positive points") {
    CHECK_THROWS_AS(fit_order({{0.5, 1.0}, {0.25, 1.0}, {0.125, 1.0}}), InsufficientDataError);
    const auto zero = fit_order({{0.5, 0.0}, {0.25, 0.0}, {0.125, 0.0}, {0.0625, 0.0}});
    CHECK(zero.identically_zero);
}

TEST_CASE("imbedded smooth data classify with orders near zero") {
    const auto ladder = make_ladder(0.25, 0.5, 6);
    const auto fam = imbed(DistributionSpec::function(DistributionAtom::FunctionId::Sin),
                           ladder, default_mollifier(), {-3.0, 3.0}, 8);
    const auto rep = classify_moderate(fam, Interval{-2.0, 2.0}, 3);
    for (const auto& e : rep.entries) {
        CHECK(!e.fit.identically_zero);
        CHECK(std::abs(e.fit.slope) <= 0.1);
    }
}

TEST_CASE("imbedded delta classifies at order 1 + |alpha|") {
    const auto ladder = make_ladder(0.25, 0.5, 6);
    const auto fam = imbed(DistributionSpec::delta(0.0), ladder, default_mollifier(),
                           {-4.0, 4.0}, 8);
    const auto rep = classify_moderate(fam, Interval{-3.5, 3.5}, 3);
    for (const auto& e : rep.entries)
        CHECK(e.fit.slope == doctest::Approx(1.0 + e.alpha.x).epsilon(0.1));
}

TEST_CASE("zero family yields the identically zero verdict") {
    const auto ladder = make_ladder(0.25, 0.5, 4);
    std::vector<GridFunction1D> members(4, GridFunction1D::zeros(-1.0, 0.125, 17));
    const Family1D fam(ladder, members, Provenance::Derived);
    const auto rep = classify_moderate(fam, Interval{-1.0, 1.0}, 2);
    CHECK(rep.identically_zero);
}

TEST_CASE("epsilon^5 families are negligible at q_max 4 but not at q_max 6") {
    const auto ladder = make_ladder(0.5, 0.5, 6);
    const auto fam = powers_family(ladder, 5.0);
    ClassificationSettings s;
    s.max_order = 2;
    s.q_max = 4.0;
    CHECK(classify_negligible(fam, Interval{-1.5, 1.5}, s).negligible);
    s.q_max = 6.0;
    CHECK(!classify_negligible(fam, Interval{-1.5, 1.5}, s).negligible);
}

TEST_CASE("families below the absolute floor are negligible") {
    const auto ladder = make_ladder(0.25, 0.5, 4);
    std::vector<GridFunction1D> members;
    for (std::size_t k = 0; k < 4; ++k)
        members.push_back(GridFunction1D::sample(-1.0, 0.125, 17,
                                                 [](double) { return 3e-14; }));
    const Family1D fam(ladder, members, Provenance::Derived);
    ClassificationSettings s;
    s.max_order = 1;
    const auto v = classify_negligible(fam, Interval{-1.0, 1.0}, s);
    CHECK(v.negligible);
    CHECK(v.below_floor);
}

TEST_CASE("two solver runs at different Picard tolerances differ below the floor") {
    const Trapezoid region(1.5, 1.0);
    const double h = 1.0 / 64.0;
    const auto ladder = make_ladder(0.25, 0.5, 4);
    const auto a = sample_solver_data([](double x) { return std::sin(x); }, region, h);
    const auto b = sample_solver_data([](double) { return 0.0; }, region, h);
    std::vector<GridFunction2D> diffs;
    for (double eps : ladder.values()) {
        (void)eps; // same data per rung; only the stopping tolerance differs
        WaveProblem p{a, b, std::nullopt, NonlinearitySpec::sine(1.0), region};
        const auto u1 = picard_semilinear(p, PicardSettings{1e-12, 300}).solution;
        const auto u2 = picard_semilinear(p, PicardSettings{1e-14, 300}).solution;
        diffs.push_back(zip(u1, u2, [](double x, double y) { return x - y; }));
    }
    const Family2D fam(ladder, diffs, Provenance::Derived);
    ClassificationSettings s;
    s.max_order = 0;
    const auto v = classify_negligible(fam, region, s);
    CHECK(v.negligible);
    CHECK(v.below_floor);
}

TEST_CASE("imbedded delta is identically zero away from its support") {
    const auto ladder = make_ladder(0.25, 0.5, 5);
    const auto fam = imbed(DistributionSpec::delta(0.0), ladder, default_mollifier(),
                           {-4.0, 4.0}, 8);
    // distance beyond R * eps_max = 2.5
    const auto rep = classify_moderate(fam, Interval{2.7, 3.8}, 2);
    CHECK(rep.identically_zero);
}

TEST_CASE("ginf report: smooth families are Ginf(0) everywhere") {
    const auto ladder = make_ladder(0.25, 0.5, 5);
    std::vector<GridFunction2D> members;
    for (double eps : ladder.values()) {
        const double h = eps / 8.0;
        const auto nx = static_cast<std::size_t>(std::llround(3.0 / h)) + 1;
        const auto nt = static_cast<std::size_t>(std::llround(1.2 / h)) + 1;
        members.push_back(GridFunction2D::sample(-1.5, 0.0, h, nx, nt, [](double x, double t) {
            return std::sin(x) * std::cos(t);
        }));
    }
    const Family2D fam(ladder, members, Provenance::Derived);
    const Trapezoid region(1.25, 1.0);
    const auto rep = ginf_report(fam, region, 0.25, ClassificationSettings{});
    REQUIRE(!rep.cells.empty());
    for (const auto& c : rep.cells) {
        CHECK(c.verdict == CellVerdict::Ginf);
        CHECK(c.ginf_order <= 0.1);
    }
}

namespace {

Family2D delta_prime_solution_family(const EpsilonLadder& ladder, double half_width,
                                     double height) {
    // closed-form d'Alembert solution for b = delta', a = 0:
    // u_eps = (phi_eps(x+t) - phi_eps(x-t)) / 2
    const auto& phi = default_mollifier();
    std::vector<GridFunction2D> members;
    for (double eps : ladder.values()) {
        const double h = eps / 8.0;
        const auto nx = static_cast<std::size_t>(std::llround(2 * half_width / h)) + 1;
        const auto nt = static_cast<std::size_t>(std::llround(height / h)) + 1;
        members.push_back(
            GridFunction2D::sample(-half_width, 0.0, h, nx, nt, [&](double x, double t) {
                return 0.5 * (phi.value((x + t) / eps) - phi.value((x - t) / eps)) / eps;
            }));
    }
    return Family2D(ladder, members, Provenance::Derived);
}

} // namespace

TEST_CASE("ginf report flags exactly the cone-hugging cells for delta-prime data") {
    const auto ladder = make_ladder(0.25, 0.5, 5);
    const auto fam = delta_prime_solution_family(ladder, 1.7, 1.1);
    const Trapezoid region(1.5, 1.0);
    const auto rep = ginf_report(fam, region, 0.25, ClassificationSettings{});
    // the cone leaves the trapezoid at t = kappa/2; below that every
    // cone-touching cell must be flagged
    const double cone_exit = region.kappa / 2.0;
    std::size_t flagged = 0;
    for (const auto& c : rep.cells) {
        if (c.distance_to_cone() == 0.0 && c.t_hi <= cone_exit + 1e-12) {
            CHECK(rep.flagged(c));
        }
        if (rep.flagged(c)) {
            ++flagged;
            CHECK(c.distance_to_cone() <= 0.5);
        }
    }
    CHECK(flagged >= 4);
}

TEST_CASE("flagged verdicts survive cell refinement around the witnessing point") {
    const auto ladder = make_ladder(0.25, 0.5, 5);
    const auto fam = delta_prime_solution_family(ladder, 1.7, 1.1);
    const Trapezoid region(1.5, 1.0);
    const double wx = 0.5, wt = 0.5; // point on the cone
    for (double side : {0.5, 0.25, 0.125}) {
        const auto rep = ginf_report(fam, region, side, ClassificationSettings{});
        bool witness_flagged = false;
        for (const auto& c : rep.cells)
            if (wx >= c.x_lo && wx <= c.x_hi && wt >= c.t_lo && wt <= c.t_hi &&
                rep.flagged(c))
                witness_flagged = true;
        CHECK(witness_flagged);
    }
}

TEST_CASE("cellization rejects cells below the coarsest spacing") {
    const auto ladder = make_ladder(0.25, 0.5, 4);
    const auto fam = delta_prime_solution_family(ladder, 1.7, 1.1);
    CHECK_THROWS_AS(ginf_report(fam, Trapezoid(1.5, 1.0), 0.05, ClassificationSettings{}),
                    CellizationError);
}

TEST_CASE("weak limit of the imbedded delta is psi(0)") {
    const auto ladder = make_ladder(0.25, 0.5, 6);
    const auto fam = imbed(DistributionSpec::delta(0.0), ladder, default_mollifier(),
                           {-4.0, 4.0}, 8);
    const TestFunctionSpec psi{"bump", 0.0, 1.5};
    const auto v = weak_limit(fam, {psi});
    REQUIRE(v.entries.size() == 1);
    CHECK(v.entries[0].converged);
    CHECK(v.entries[0].limit == doctest::Approx(psi.value1d(0.0)).epsilon(1e-6));
}

TEST_CASE("weak limit of the squared delta diverges like 1/eps") {
    const auto ladder = make_ladder(0.25, 0.5, 6);
    const auto d = imbed(DistributionSpec::delta(0.0), ladder, default_mollifier(),
                         {-4.0, 4.0}, 8);
    const auto sq = pointwise_product(d, d);
    const TestFunctionSpec psi{"bump", 0.0, 1.5};
    const auto v = weak_limit(sq, {psi});
    CHECK(!v.entries[0].converged);
    std::vector<std::pair<double, double>> mags;
    for (const auto& [eps, p] : v.entries[0].pairings) mags.push_back({eps, std::abs(p)});
    CHECK(fit_order(mags).slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("weak limits ignore negligible perturbations") {
    const auto ladder = make_ladder(0.25, 0.5, 6);
    const auto fam = imbed(DistributionSpec::heaviside(0.0), ladder, default_mollifier(),
                           {-4.0, 4.0}, 8);
    std::vector<GridFunction1D> noisy;
    for (std::size_t k = 0; k < fam.size(); ++k) {
        const double eps = fam.epsilon(k);
        noisy.push_back(zip(fam.member(k),
                            GridFunction1D::sample(fam.member(k).x0(), fam.member(k).spacing(),
                                                   fam.member(k).size(),
                                                   [&](double x) {
                                                       return std::pow(eps, 5.0) * std::sin(x);
                                                   }),
                            [](double a, double b) { return a + b; }));
    }
    const Family1D pert(ladder, noisy, Provenance::Derived);
    const TestFunctionSpec psi{"bump", 0.3, 0.8};
    const auto v1 = weak_limit(fam, {psi});
    const auto v2 = weak_limit(pert, {psi});
    CHECK(std::abs(v1.entries[0].limit - v2.entries[0].limit) <= 1e-8);
}

TEST_CASE("l1g limit: imbedded heaviside converges at first order") {
    const auto ladder = make_ladder(0.25, 0.5, 6);
    const auto fam = imbed(DistributionSpec::heaviside(0.0), ladder, default_mollifier(),
                           {-4.0, 4.0}, 16);
    const auto rep = l1g_limit(fam, Interval{-3.0, 3.0});
    CHECK(rep.converged);
    CHECK(rep.distance_fit.decay_order() == doctest::Approx(1.0).epsilon(0.35));
    CHECK(rep.limit_index == fam.size() - 1);
}

TEST_CASE("l1g limit: the imbedded delta does not converge") {
    const auto ladder = make_ladder(0.25, 0.5, 6);
    const auto fam = imbed(DistributionSpec::delta(0.0), ladder, default_mollifier(),
                           {-4.0, 4.0}, 16);
    const auto rep = l1g_limit(fam, Interval{-3.0, 3.0});
    CHECK(!rep.converged);
    // distances stay bounded away from zero
    for (double d : rep.pairwise_distances) CHECK(d > 0.1);
}

TEST_CASE("l1g limit: smooth families converge trivially") {
    const auto ladder = make_ladder(0.25, 0.5, 5);
    std::vector<GridFunction1D> members;
    for (double eps : ladder.values()) {
        const double h = eps / 8.0;
        const auto n = static_cast<std::size_t>(std::llround(4.0 / h)) + 1;
        members.push_back(GridFunction1D::sample(-2.0, h, n,
                                                 [](double x) { return std::sin(x); }));
    }
    const Family1D fam(ladder, members, Provenance::Derived);
    const auto rep = l1g_limit(fam, Interval{-2.0, 2.0});
    CHECK(rep.converged);
}

TEST_CASE("resampling picks exact nodes on nested dyadic grids") {
    const auto fine = GridFunction1D::sample(-1.0, 0.0625, 33, [](double x) { return x * x; });
    const auto coarse = GridFunction1D::sample(-1.0, 0.25, 9, [](double x) { return 0.0 * x; });
    const auto r = resample_to_coarsest(fine, coarse);
    for (std::size_t i = 0; i < r.size(); ++i)
        CHECK(r[i] == doctest::Approx(r.x(i) * r.x(i)));
}
