#include "ccfv/errors.hpp"
#include "ccfv/steady.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ccfv;

TEST_CASE("alpha = 0 with positive g reduces to the linear case, c = gamma") {
    const Mesh m = Mesh::interval(1.0, 16);
    const BoundaryData bc = BoundaryData::uniform(m, 0.7, 1.0);
    const CellField c = solve_semilinear(0.0, m, bc, 1e-12);
    for (double v : c.values)
        CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("gamma = 0 makes zero the exact root for any alpha") {
    const Mesh m = Mesh::interval(1.0, 16);
    const BoundaryData bc = BoundaryData::uniform(m, 0.0, 1.0);
    const CellField c = solve_semilinear(3.0, m, bc, 1e-12);
    for (double v : c.values)
        CHECK(v == 0.0);
}

TEST_CASE("negative alpha is a domain error") {
    const Mesh m = Mesh::interval(1.0, 8);
    const BoundaryData bc = BoundaryData::uniform(m, 0.5, 1.0);
    CHECK_THROWS_AS(solve_semilinear(-1.0, m, bc, 1e-12), std::domain_error);
}

TEST_CASE("fixed-point consistency with the linear signal solver") {
    // feeding n = alpha e^c back into the linear solve must reproduce c
    for (const Mesh& m : {Mesh::interval(1.0, 32), Mesh::rectangle(1.0, 1.0, 12, 12)}) {
        const BoundaryData bc = BoundaryData::uniform(m, 0.8, 1.0);
        const double tol = 1e-12;
        for (double alpha : {0.3, 1.0, 2.5}) {
            const CellField c = solve_semilinear(alpha, m, bc, tol);
            CellField n(m);
            for (size_t i = 0; i < c.size(); ++i)
                n[i] = alpha * std::exp(c[i]);
            const SignalSolution lin = solve_signal(n, bc, tol);
            for (size_t i = 0; i < c.size(); ++i)
                CHECK(std::abs(lin.c[i] - c[i]) <= 10.0 * tol);
        }
    }
}

TEST_CASE("mass_of_alpha basics and bounds") {
    const Mesh m = Mesh::interval(2.0, 32);
    const BoundaryData bc = BoundaryData::uniform(m, 0.6, 1.0);
    CHECK(mass_of_alpha(0.0, m, bc, 1e-12) == 0.0);

    const BoundaryData flat = BoundaryData::uniform(m, 0.0, 1.0);
    CHECK(mass_of_alpha(1.7, m, flat, 1e-12) ==
          doctest::Approx(1.7 * m.domain_measure()).epsilon(1e-13));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 4.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double alpha = u(rng);
        const double mass = mass_of_alpha(alpha, m, bc, 1e-12);
        CHECK(mass >= alpha * m.domain_measure() * (1.0 - 1e-12));
        CHECK(mass <= alpha * std::exp(0.6) * m.domain_measure() * (1.0 + 1e-12));
    }
}

TEST_CASE("gamma = 0 stationary state is the flat state m/|Omega|") {
    const Mesh m = Mesh::interval(2.0, 32);
    const BoundaryData bc = BoundaryData::uniform(m, 0.0, 1.0);
    const StationaryState st = solve_stationary(3.0, m, bc, 1e-12, 1e-10);
    CHECK(st.alpha == doctest::Approx(1.5).epsilon(1e-12));
    for (double v : st.n.values)
        CHECK(v == doctest::Approx(1.5).epsilon(1e-12));
    for (double v : st.c.values)
        CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("solve_stationary honors residual tolerances and the alpha bracket") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> um(0.2, 3.0);
    std::uniform_real_distribution<double> ug(0.4, 2.0);
    std::uniform_real_distribution<double> ugam(0.05, 1.0);
    for (const Mesh& m : {Mesh::interval(1.0, 48), Mesh::rectangle(1.0, 1.0, 10, 10)}) {
        for (int trial = 0; trial < 6; ++trial) {
            const double mass = um(rng);
            const double gamma = ugam(rng);
            const BoundaryData bc = BoundaryData::uniform(m, gamma, ug(rng));
            const StationaryState st = solve_stationary(mass, m, bc, 1e-12, 1e-10);
            CHECK(st.mass_residual <= 1e-10 * mass * 1.01);
            CHECK(st.elliptic_residual <= 1e-12);
            const double lo = mass / (std::exp(gamma) * m.domain_measure());
            const double hi = mass / m.domain_measure();
            CHECK(st.alpha >= lo * (1.0 - 1e-12));
            CHECK(st.alpha <= hi * (1.0 + 1e-12));
            CHECK(st.n.min() >= st.alpha * (1.0 - 1e-13));
            CHECK(st.c.min() >= -1e-12);
            CHECK(st.c.max() <= gamma + 1e-12);
        }
    }
}

TEST_CASE("exponential structure: n/e^c is cellwise constant") {
    const Mesh m = Mesh::interval(1.0, 64);
    const BoundaryData bc = BoundaryData::uniform(m, 0.5, 1.0);
    const StationaryState st = solve_stationary(1.0, m, bc, 1e-12, 1e-10);
    for (size_t i = 0; i < st.n.size(); ++i)
        CHECK(st.n[i] / std::exp(st.c[i]) == doctest::Approx(st.alpha).epsilon(1e-12));
}

TEST_CASE("stationary state is nonconstant for gamma > 0") {
    const Mesh m = Mesh::interval(1.0, 64);
    const BoundaryData bc = BoundaryData::uniform(m, 0.5, 1.0);
    const StationaryState st = solve_stationary(1.0, m, bc, 1e-12, 1e-10);
    const double spread = st.n.max() - st.n.min();
    CHECK(spread > 1e-3 * (1.0 / m.domain_measure()));
}

TEST_CASE("stationary preconditions") {
    const Mesh m = Mesh::interval(1.0, 8);
    const BoundaryData bc = BoundaryData::uniform(m, 0.5, 1.0);
    CHECK_THROWS_AS(solve_stationary(0.0, m, bc, 1e-12, 1e-10), std::domain_error);
    CHECK_THROWS_AS(solve_stationary(-1.0, m, bc, 1e-12, 1e-10), std::domain_error);
    const BoundaryData gzero = BoundaryData::uniform(m, 0.5, 0.0);
    CHECK_THROWS_AS(solve_stationary(1.0, m, gzero, 1e-12, 1e-10), std::domain_error);
}
