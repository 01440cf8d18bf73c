#include <cmath>
#include <vector>

#include "doctest.h"
#include "gflab/derivatives.hpp"
#include "gflab/mollifier.hpp"
#include "gflab/errors.hpp"
#include "gflab/family.hpp"
#include "gflab/grid.hpp"
#include "gflab/ladder.hpp"
#include "gflab/nonlinearity.hpp"
#include "gflab/norms.hpp"
#include "test_support.hpp"

using namespace gflab;
namespace ts = testing_support;

TEST_CASE("geometric ladder values") {
    const auto l = make_ladder(0.5, 0.5, 4);
    REQUIRE(l.size() == 4);
    CHECK(l[0] == doctest::Approx(0.5));
    CHECK(l[1] == doctest::Approx(0.25));
    CHECK(l[2] == doctest::Approx(0.125));
    CHECK(l[3] == doctest::Approx(0.0625));
}

TEST_CASE("ladder rejects short and malformed input") {
    CHECK_THROWS_AS(make_ladder(1.0, 0.5, 1), ConfigError);
    CHECK_THROWS_AS(make_ladder(0.5, 1.5, 6), ConfigError);
    CHECK_THROWS_AS(make_ladder(2.0, 0.5, 6), ConfigError);
    CHECK_THROWS_AS(EpsilonLadder({0.5, 0.5, 0.25, 0.1}), ConfigError);
}

TEST_CASE("ladder with non-dyadic ratio") {
    const auto l = make_ladder(0.25, 0.7, 6);
    REQUIRE(l.size() == 6);
    CHECK(l.back() == doctest::Approx(0.25 * std::pow(0.7, 5)));
}

TEST_CASE("trapezoid membership") {
    const Trapezoid K(1.0, 1.0);
    CHECK(K.contains(0.0, 0.0));
    CHECK(K.contains(0.5, 0.5));
    CHECK(!K.contains(0.6, 0.5));
    CHECK(!K.contains(0.0, 1.5));
    const Trapezoid lower(1.0, 1.0, Trapezoid::Orientation::Lower);
    CHECK(lower.contains(0.25, -0.5));
    CHECK(!lower.contains(0.25, 0.5));
    CHECK_THROWS_AS(Trapezoid(1.0, 2.0), DomainError);
}

TEST_CASE("sup norm examples") {
    const Trapezoid K(1.0, 0.5);
    const auto c3 = GridFunction2D::sample(-1.5, 0.0, 0.0625, 49, 9,
                                           [](double, double) { return 3.0; });
    CHECK(sup_norm(c3, K) == doctest::Approx(3.0));
    const auto zero = GridFunction2D::zeros(-1.5, 0.0, 0.0625, 49, 9);
    CHECK(sup_norm(zero, K) == 0.0);

    // f(x,t) = x on K_T with kappa = 1, T = 0: boundary attained
    const Trapezoid flat(1.0, 0.0);
    const auto fx = GridFunction2D::sample(-1.25, 0.0, 0.0625, 41, 5,
                                           [](double x, double) { return x; });
    CHECK(sup_norm(fx, flat) == doctest::Approx(1.0));
}

TEST_CASE("sup norm region coverage error") {
    const auto g = GridFunction2D::zeros(-0.5, 0.0, 0.125, 9, 5);
    CHECK_THROWS_AS(sup_norm(g, Trapezoid(1.0, 0.5)), DomainError);
}

TEST_CASE("l1 norm of constant one approximates trapezoid area") {
    const double h = 1.0 / 128.0;
    const Trapezoid K(1.0, 1.0);
    const auto one = GridFunction2D::sample(-1.0 - 4 * h, 0.0, h, 265, 133,
                                            [](double, double) { return 1.0; });
    CHECK(std::abs(l1_norm(one, K) - 1.0) <= 2.0 * h);
    CHECK(l1_norm(GridFunction2D::zeros(-1.5, 0.0, h, 400, 140), K) == 0.0);
}

TEST_CASE("l1 norm of an imbedded delta column matches the iterated integral") {
    // f(x,t) = delta_eps(x), constant in t: the integral over K_T equals
    // the time extent times the L1 mass of the scaled profile as long as
    // the support stays inside every time slice
    const gflab::Mollifier phi(2, 64);
    const double eps = 0.125, h = eps / 16.0, T = 0.5, kappa = 1.5;
    const Trapezoid K(kappa, T);
    const auto nx = static_cast<std::size_t>(std::llround(2 * (kappa + 0.25) / h)) + 1;
    const auto nt = static_cast<std::size_t>(std::llround((T + 0.25) / h)) + 1;
    const auto f = GridFunction2D::sample(-(kappa + 0.25), 0.0, h, nx, nt,
                                          [&](double x, double) {
                                              return phi.value(x / eps) / eps;
                                          });
    const double oracle = T * phi.integral_of_abs();
    CHECK(l1_norm(f, K) == doctest::Approx(oracle).epsilon(2.0 * h));
}

TEST_CASE("norm triangle inequality on random grids") {
    const Trapezoid K(1.0, 0.75);
    for (int trial = 0; trial < 25; ++trial) {
        const double h = 1.0 / 32.0;
        auto rand_grid = [&] {
            return GridFunction2D::sample(-1.25, 0.0, h, 81, 29, [&](double, double) {
                return ts::uniform(-2.0, 2.0);
            });
        };
        const auto f = rand_grid();
        const auto g = rand_grid();
        const auto sum = zip(f, g, [](double a, double b) { return a + b; });
        CHECK(sup_norm(sum, K) <= sup_norm(f, K) + sup_norm(g, K) + 1e-12);
        CHECK(l1_norm(sum, K) <= l1_norm(f, K) + l1_norm(g, K) + 1e-12);
    }
}

TEST_CASE("sup norm monotone in T") {
    const auto f = GridFunction2D::sample(-1.5, 0.0, 1.0 / 64.0, 193, 70,
                                          [](double x, double t) { return std::sin(3 * x) * (1 + t); });
    const Trapezoid K(1.0, 1.0);
    double prev = 0.0;
    for (double s : {0.25, 0.5, 0.75, 1.0}) {
        const double v = sup_norm(f, K.up_to(s));
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("fd derivative of constants and quadratics") {
    const auto c = GridFunction1D::sample(-1.0, 0.01, 201, [](double) { return 7.5; });
    const auto dc = fd_derivative(c, 2);
    for (std::size_t i = 0; i < dc.size(); ++i) CHECK(dc[i] == doctest::Approx(0.0));

    const auto q = GridFunction1D::sample(-1.0, 0.01, 201, [](double x) { return x * x; });
    const auto dq = fd_derivative(q, 2);
    for (std::size_t i = 0; i < dq.size(); ++i) CHECK(dq[i] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(dq.size() == q.size() - 4);
    CHECK(dq.x0() == doctest::Approx(q.x0() + 2 * q.spacing()));
}

TEST_CASE("fd derivative of sine obeys the Taylor remainder bound") {
    const double h = 0.01;
    const auto s = GridFunction1D::sample(-2.0, h, 401, [](double x) { return std::sin(x); });
    const auto d = fd_derivative(s, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        worst = std::max(worst, std::abs(d[i] - std::cos(d.x(i))));
    CHECK(worst <= h * h / 6.0 * 1.0 + 1e-12); // sup |f'''| = 1
}

TEST_CASE("fd derivative requires enough points") {
    const auto s = GridFunction1D::sample(0.0, 0.1, 5, [](double x) { return x; });
    CHECK_THROWS_AS(fd_derivative(s, 3), DomainError);
}

TEST_CASE("fd derivative is linear to rounding") {
    const double h = 1.0 / 64.0;
    const auto f = GridFunction1D::sample(-1.0, h, 129, [](double x) { return std::sin(3 * x); });
    const auto g = GridFunction1D::sample(-1.0, h, 129, [](double x) { return std::exp(x); });
    const auto combo = zip(f, g, [](double a, double b) { return 2.0 * a - 0.5 * b; });
    const auto lhs = fd_derivative(combo, 2);
    const auto rhs = zip(fd_derivative(f, 2), fd_derivative(g, 2),
                         [](double a, double b) { return 2.0 * a - 0.5 * b; });
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double scale = std::max(1.0, std::abs(rhs[i]));
        CHECK(std::abs(lhs[i] - rhs[i]) <= 1e-12 * scale);
    }
}

TEST_CASE("2D mixed derivative matches closed form") {
    const double h = 1.0 / 128.0;
    const auto f = GridFunction2D::sample(-1.0, 0.0, h, 257, 65, [](double x, double t) {
        return std::sin(x) * std::cos(t);
    });
    const auto d = fd_derivative(f, {1, 1});
    double worst = 0.0;
    for (std::size_t n = 0; n < d.nt(); ++n)
        for (std::size_t i = 0; i < d.nx(); ++i)
            worst = std::max(worst,
                             std::abs(d.at(i, n) + std::cos(d.x(i)) * std::sin(d.t(n))));
    CHECK(worst <= 5 * h * h);
}

TEST_CASE("nonlinearity catalog metadata") {
    const auto z = NonlinearitySpec::zero();
    CHECK(z(1.7) == 0.0);
    CHECK(z.bounded());

    const auto lin = NonlinearitySpec::linear(-2.0);
    CHECK(lin(3.0) == doctest::Approx(-6.0));
    CHECK(!lin.bounded());
    CHECK(lin.lipschitz_bound() == doctest::Approx(2.0));

    const auto sq = NonlinearitySpec::squash(1.0);
    CHECK(sq.bounded());
    REQUIRE(sq.limit_at_infinity().has_value());
    CHECK(*sq.limit_at_infinity() == doctest::Approx(1.0));
    CHECK(sq(0.0) == 0.0);

    const auto osq = NonlinearitySpec::odd_squash(1.0);
    CHECK(osq.sup_bound() == doctest::Approx(0.5));
    REQUIRE(osq.limit_at_infinity().has_value());
    CHECK(*osq.limit_at_infinity() == doctest::Approx(0.0));

    CHECK(!NonlinearitySpec::sine(1.0).limit_at_infinity().has_value());
    CHECK_THROWS_AS(NonlinearitySpec::from_name("cubic", 1.0), ConfigError);
}

TEST_CASE("nonlinearities obey their Lipschitz bound on random samples") {
    const std::vector<NonlinearitySpec> catalog = {
        NonlinearitySpec::zero(), NonlinearitySpec::linear(1.5), NonlinearitySpec::sine(0.7),
        NonlinearitySpec::squash(2.0), NonlinearitySpec::odd_squash(1.0)};
    for (const auto& f : catalog) {
        for (int trial = 0; trial < 200; ++trial) {
            const double a = ts::uniform(-20.0, 20.0);
            const double b = ts::uniform(-20.0, 20.0);
            CHECK(std::abs(f(a) - f(b)) <= f.lipschitz_bound() * std::abs(a - b) + 1e-12);
        }
    }
}

TEST_CASE("family pointwise operations") {
    const auto ladder = make_ladder(0.5, 0.5, 4);
    std::vector<GridFunction1D> members;
    for (double eps : ladder.values())
        members.push_back(GridFunction1D::sample(-1.0, 0.125, 17,
                                                 [eps](double x) { return eps + x; }));
    const Family1D u(ladder, members, Provenance::Derived);

    const auto zero = pointwise_apply(NonlinearitySpec::zero(), u);
    for (std::size_t k = 0; k < zero.size(); ++k)
        for (std::size_t i = 0; i < zero.member(k).size(); ++i)
            CHECK(zero.member(k)[i] == 0.0);

    const auto ident = pointwise_apply(NonlinearitySpec::linear(1.0), u);
    for (std::size_t k = 0; k < u.size(); ++k)
        for (std::size_t i = 0; i < u.member(k).size(); ++i)
            CHECK(ident.member(k)[i] == doctest::Approx(u.member(k)[i]));

    // sine of a constant family is the constant sin(c_eps)
    std::vector<GridFunction1D> consts;
    for (double eps : ladder.values())
        consts.push_back(GridFunction1D::sample(-1.0, 0.125, 17,
                                                [eps](double) { return eps; }));
    const Family1D c(ladder, consts, Provenance::Derived);
    const auto sc = pointwise_apply(NonlinearitySpec::sine(1.0), c);
    for (std::size_t k = 0; k < c.size(); ++k)
        CHECK(sc.member(k)[3] == doctest::Approx(std::sin(ladder[k])));

    const auto prod = pointwise_product(u, zero);
    for (std::size_t k = 0; k < prod.size(); ++k)
        CHECK(sup_norm(prod.member(k), Interval{-1.0, 1.0}) == 0.0);

    std::vector<GridFunction1D> ones;
    for (std::size_t k = 0; k < ladder.size(); ++k)
        ones.push_back(GridFunction1D::sample(-1.0, 0.125, 17, [](double) { return 1.0; }));
    const auto same = pointwise_product(u, Family1D(ladder, ones, Provenance::Derived));
    for (std::size_t k = 0; k < same.size(); ++k)
        for (std::size_t i = 0; i < same.member(k).size(); ++i)
            CHECK(same.member(k)[i] == doctest::Approx(u.member(k)[i]));
}

TEST_CASE("family geometry mismatch is rejected") {
    const auto ladder = make_ladder(0.5, 0.5, 4);
    std::vector<GridFunction1D> a, b;
    for (std::size_t k = 0; k < 4; ++k) {
        a.push_back(GridFunction1D::zeros(-1.0, 0.125, 17));
        b.push_back(GridFunction1D::zeros(-1.0, 0.25, 9));
    }
    const Family1D fa(ladder, a, Provenance::Derived);
    const Family1D fb(ladder, b, Provenance::Derived);
    CHECK_THROWS_AS(pointwise_product(fa, fb), DomainError);
}

TEST_CASE("cumulative integral matches closed form") {
    const double h = 1.0 / 256.0;
    const auto f = GridFunction1D::sample(0.0, h, 257, [](double x) { return std::cos(x); });
    const auto B = cumulative_integral(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < B.size(); ++i)
        worst = std::max(worst, std::abs(B[i] - std::sin(B.x(i))));
    CHECK(worst <= h * h);
}
