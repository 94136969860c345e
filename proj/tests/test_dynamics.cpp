#include <doctest.h>

#include <cmath>
#include <set>

#include "attractors/dynamics.hpp"
#include "attractors/models.hpp"
#include "support.hpp"

using namespace attractors;

TEST_SUITE("dynamics") {

TEST_CASE("one RK4 step on x' = a x equals the 4th order Taylor polynomial") {
    const double a = -0.7;
    DynamicalSystem sys(
        TimeKind::continuous,
        [](Vector& out, const Vector& u, const Vector& p, double) { out = p[0] * u; },
        Vector::Ones(1), Vector::Constant(1, a));
    for (double h : {0.01, 0.1, 0.5}) {
        const double z = a * h;
        const double taylor = 1 + z + z * z / 2 + z * z * z / 6 + z * z * z * z / 24;
        const Vector u = step(sys, Vector::Ones(1), h);
        CHECK(u[0] == doctest::Approx(taylor).epsilon(1e-14));
    }
}

TEST_CASE("RK4 global error shrinks 16-fold when the step halves") {
    // Harmonic oscillator, exact solution (cos t, -sin t).
    DynamicalSystem sys(
        TimeKind::continuous,
        [](Vector& out, const Vector& u, const Vector&, double) {
            out.resize(2);
            out << u[1], -u[0];
        },
        Vector::Zero(2), Vector::Zero(0));
    auto error = [&](double h) {
        Vector u(2);
        u << 1.0, 0.0;
        Integrator in(sys, h);
        const int n = static_cast<int>(std::lround(2.0 / h));
        for (int i = 0; i < n; ++i)
            in.advance(u);
        Vector exact(2);
        exact << std::cos(2.0), -std::sin(2.0);
        return (u - exact).norm();
    };
    const double ratio = error(0.1) / error(0.05);
    CHECK(ratio >= 14.0);
    CHECK(ratio <= 18.0);
}

TEST_CASE("time-dependent rules see the stage times") {
    // x' = t, x(0) = 0 -> x(t) = t^2 / 2, integrated exactly by RK4.
    DynamicalSystem sys(
        TimeKind::continuous,
        [](Vector& out, const Vector&, const Vector&, double t) { out = Vector::Constant(1, t); },
        Vector::Zero(1), Vector::Zero(0));
    Vector u = Vector::Zero(1);
    Integrator in(sys, 0.25);
    for (int i = 0; i < 8; ++i)
        in.advance(u);
    CHECK(in.time() == doctest::Approx(2.0));
    CHECK(u[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("discrete systems apply the map once per step") {
    const DynamicalSystem h = henon();
    Vector u(2);
    u << 0.1, 0.2;
    const Vector v = step(h, u, 1.0);
    CHECK(v[0] == doctest::Approx(1 - 1.4 * 0.01 + 0.2));
    CHECK(v[1] == doctest::Approx(0.3 * 0.1));
}

TEST_CASE("parameters are addressed from 1") {
    DynamicalSystem sys = lorenz84();
    CHECK(sys.parameter(2) == doctest::Approx(1.347));
    sys.set_parameter(2, 1.36);
    CHECK(sys.parameters()[1] == 1.36);
    CHECK_THROWS_AS(sys.set_parameter(0, 1.0), ConfigError);
    CHECK_THROWS_AS(sys.set_parameter(5, 1.0), ConfigError);
    CHECK_THROWS_AS((void)sys.parameter(5), ConfigError);
}

TEST_CASE("divergence is detected and reported with its time") {
    CHECK(is_diverged(Vector::Constant(2, std::nan("")), 1e12));
    CHECK(is_diverged(Vector::Constant(1, 2e12), 1e12));
    CHECK_FALSE(is_diverged(Vector::Constant(1, 5.0), 1e12));

    // x' = x^2 from x = 1 blows up at t = 1.
    DynamicalSystem blow(
        TimeKind::continuous,
        [](Vector& out, const Vector& u, const Vector&, double) { out = u.array().square(); },
        Vector::Ones(1), Vector::Zero(0));
    try {
        (void)trajectory(blow, Vector::Ones(1), 5.0, 0.0, 0.01, 0.01);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.time() > 0.9);
        CHECK(e.time() < 1.2);
    }
}

TEST_CASE("trajectory sampling counts and stride checks") {
    const auto sys = testing_support::linear_decay(2);
    const auto tr = trajectory(sys, Vector::Ones(2), 10.0, 5.0, 0.05, 0.5);
    CHECK(tr.size() == 21);
    CHECK(tr.states(0, 0) == doctest::Approx(std::exp(-5.0)).epsilon(1e-6));
    CHECK(tr.states(20, 1) == doctest::Approx(std::exp(-15.0)).epsilon(1e-5));
    CHECK_THROWS_AS((void)trajectory(sys, Vector::Ones(2), 10.0, 0.0, 0.2, 0.3), ConfigError);
    CHECK_THROWS_AS((void)trajectory(sys, Vector::Ones(3), 10.0, 0.0, 0.1, 0.1), ConfigError);
}

TEST_CASE("state space boxes validate their corners") {
    CHECK_THROWS_AS(StateSpaceBox(Vector::Ones(2), Vector::Zero(2)), ConfigError);
    CHECK_THROWS_AS(StateSpaceBox(Vector::Zero(2), Vector::Ones(3)), ConfigError);
    const auto box = StateSpaceBox::cube(3, -1.0, 1.0);
    CHECK(box.volume() == doctest::Approx(8.0));
    CHECK(box.contains(Vector::Zero(3)));
    CHECK_FALSE(box.contains(Vector::Constant(3, 1.5)));
}

TEST_CASE("box sampler is addressed by index") {
    const auto box = StateSpaceBox::cube(3, -2.0, 5.0);
    BoxSampler a(box, 42), b(box, 42), c(box, 43);
    std::set<double> seen;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const Vector x = a(i);
        CHECK(box.contains(x));
        CHECK((x.array() > box.lower.array()).all());
        CHECK((x.array() < box.upper.array()).all());
        seen.insert(x[0]);
    }
    CHECK(seen.size() == 2000);
    // Order of evaluation does not matter.
    CHECK(a(1234) == b(1234));
    CHECK(b(7) == a(7));
    CHECK(a(7) != c(7));
    const auto list = sample_initial_conditions(box, 5, 42);
    for (std::uint64_t i = 0; i < 5; ++i)
        CHECK(list[i] == a(i));
}

TEST_CASE("box sampler is roughly uniform") {
    BoxSampler s(StateSpaceBox::cube(1, 0.0, 1.0), 9);
    const int n = 20000;
    int below = 0;
    double mean = 0;
    for (int i = 0; i < n; ++i) {
        const double x = s(static_cast<std::uint64_t>(i))[0];
        below += x < 0.25;
        mean += x / n;
    }
    CHECK(mean == doctest::Approx(0.5).epsilon(0.02));
    CHECK(static_cast<double>(below) / n == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("periodic axes wrap into [0, period)") {
    auto sys = kuramoto_first_order(3, 0.0, Vector::Zero(3));
    Vector u(3);
    u << -0.5, 7.0, 3.0;
    sys.wrap(u);
    const double tau = 2 * M_PI;
    CHECK(u[0] == doctest::Approx(tau - 0.5));
    CHECK(u[1] == doctest::Approx(7.0 - tau));
    CHECK(u[2] == 3.0);
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(u[i] >= 0.0);
        CHECK(u[i] < tau);
    }
}

}
