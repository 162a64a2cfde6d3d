#include "doctest.h"

#include <cmath>

#include "egrowth/solver.hpp"

using namespace egrowth;

TEST_CASE("harmonic polynomial boundary data is reproduced") {
    const auto s = GridSpec::square(-2.0, 2.0, 129);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const EllipticSystem sys(OperatorDesc::laplace(), d);
    const BoundaryProfile f(d, [](const BoundaryNode& b) { return b.position.x * b.position.x - b.position.y * b.position.y; });
    SolverReport rep;
    const ScalarField u = sys.solve(ScalarField(s), f.values(), nullptr, {}, &rep);
    double err = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!d.inside(k)) continue;
        const Point p = s.node(k);
        err = std::max(err, std::abs(u[k] - (p.x * p.x - p.y * p.y)));
    }
    MESSAGE("sweeps " << rep.iterations << " omega " << rep.omega);
    CHECK(rep.residual <= 1e-10);
    CHECK(err < 1e-3);
}

TEST_CASE("poisson solve with quadratic solution") {
    const auto s = GridSpec::square(-2.0, 2.0, 129);
    const GridDomain d = make_ellipse({0.1, 0}, 1.3, 0.9, s);
    const EllipticSystem sys(OperatorDesc::laplace(), d);
    auto exact = [](Point p) { return p.x * p.x + 2.0 * p.y * p.y + p.x; };
    const BoundaryProfile f(d, [&](const BoundaryNode& b) { return exact(b.position); });
    const ScalarField u = sys.solve(ScalarField(s, 6.0), f.values());
    double err = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (d.inside(k)) err = std::max(err, std::abs(u[k] - exact(s.node(k))));
    }
    CHECK(err < 2e-3);
    const ScalarField lu = sys.apply(u, f.values());
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (d.inside(k)) REQUIRE(std::abs(lu[k] - 6.0) < 1e-5);
    }
}

TEST_CASE("cg fallback agrees with sor") {
    const auto s = GridSpec::square(-2.0, 2.0, 65);
    const GridDomain d = make_disk({0, 0}, 1.2, s);
    const EllipticSystem sys(OperatorDesc::laplace(), d);
    const BoundaryProfile f(d, [](const BoundaryNode& b) { return b.position.x; });
    const ScalarField a = sys.solve(ScalarField(s, 1.0), f.values());
    SolverOptions only_cg;
    only_cg.max_sweeps = 0;
    SolverReport rep;
    const ScalarField b = sys.solve(ScalarField(s, 1.0), f.values(), nullptr, only_cg, &rep);
    CHECK(rep.used_cg);
    CHECK((a - b).max_abs() < 1e-8);
}

TEST_CASE("obstacle solve respects the constraint") {
    const auto s = GridSpec::square(-1.0, 1.0, 65);
    const EllipticSystem sys = EllipticSystem::box(OperatorDesc::laplace(), s);
    const auto obstacle = ScalarField::sample(s, [](Point p) { return 0.2 - p.x * p.x - p.y * p.y; });
    const ScalarField zero(s);
    const ScalarField u = sys.solve_obstacle(zero, zero.values(), obstacle, 1e-13, 100000);
    const ScalarField lu = sys.apply(u, zero.values());
    for (int j = 1; j < s.ny - 1; ++j) {
        for (int i = 1; i < s.nx - 1; ++i) {
            const std::size_t k = s.index(i, j);
            REQUIRE(u[k] >= obstacle[k]);
            CHECK(lu[k] <= 1e-6);
        }
    }
}
