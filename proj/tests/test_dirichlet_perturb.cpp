#include "doctest.h"

#include <cmath>

#include "egrowth/dirichlet_perturb.hpp"
#include "egrowth/perturbation.hpp"

using namespace egrowth;

namespace {

const GridSpec& box() {
    static const GridSpec s = GridSpec::square(-2.0, 2.0, 256);
    return s;
}

const GridDomain& disk() {
    static const GridDomain d = make_disk({0, 0}, 1.0, box());
    return d;
}

std::vector<double> inside_values(const ScalarField& f) {
    std::vector<double> out;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (disk().inside(k)) out.push_back(f[k]);
    }
    return out;
}

}  // namespace

TEST_CASE("helmholtz golden") {
    const BoundaryProfile one(disk(), [](const BoundaryNode&) { return 1.0; });
    const ScalarField u(box(), 1.0);
    const ScalarField phi0 = dirichlet_schrodinger_first_order(disk(), u, one, 0.0);
    const ScalarField phi = dirichlet_schrodinger_first_order(disk(), u, one, 0.1);
    double err = 0.0;
    for (std::size_t k = 0; k < box().size(); ++k) {
        if (!disk().inside(k)) continue;
        const Point z = box().node(k);
        err = std::max(err, std::abs(phi[k] - (1.0 - 0.025 * (1.0 - dot(z, z)))));
        REQUIRE(std::abs(phi0[k] - 1.0) < 1e-8);
    }
    CHECK(err < 1e-3);
}

TEST_CASE("schrodinger first order against direct solves") {
    const auto u = ScalarField::sample(box(), [](Point p) { return 1.0 + p.y * p.y; });
    const BoundaryProfile f(disk(), [](const BoundaryNode& b) { return 1.0 + b.position.x; });
    const ScalarField phi0 = dirichlet_schrodinger_first_order(disk(), u, f, 0.0);
    const ScalarField coef = (1.0 / 0.1) * (dirichlet_schrodinger_first_order(disk(), u, f, 0.1) - phi0);
    const VariationReport r = defect_study("dirichlet-schrodinger", inside_values(phi0), inside_values(coef),
                                           [&](double e) {
                                               return inside_values(dirichlet_solve(OperatorDesc::schrodinger(e * u), disk(), f));
                                           },
                                           0.1);
    MESSAGE("ratio " << r.ratio);
    CHECK(r.pass());
}

TEST_CASE("beltrami first variation of the quadratic example") {
    const auto u = ScalarField::sample(box(), [](Point p) { return dot(p, p); });
    const BoundaryProfile f(disk(), [](const BoundaryNode& b) { return b.position.x * b.position.x - b.position.y * b.position.y; });
    const ScalarField phi0 = dirichlet_beltrami_first_order(disk(), u, f, 0.0);
    const ScalarField phi1 = dirichlet_beltrami_first_order(disk(), u, f, 1.0);
    // grad u . grad phi0 = 4(x^2 - y^2), so psi = (x^2 - y^2)(1 - r^2) / 3.
    double err = 0.0;
    for (std::size_t k = 0; k < box().size(); ++k) {
        if (!disk().inside(k)) continue;
        const Point z = box().node(k);
        const double want = (z.x * z.x - z.y * z.y) * (1.0 - dot(z, z)) / 3.0;
        err = std::max(err, std::abs(phi1[k] - phi0[k] - want));
    }
    CHECK(err < 1e-3);
    const ScalarField coef = phi1 - phi0;
    const ScalarField one(box(), 1.0);
    const VariationReport r = defect_study("dirichlet-beltrami", inside_values(phi0), inside_values(coef),
                                           [&](double e) {
                                               return inside_values(dirichlet_solve(OperatorDesc::beltrami(one + e * u), disk(), f));
                                           },
                                           0.1);
    MESSAGE("ratio " << r.ratio);
    CHECK(r.pass());
}

TEST_CASE("beltrami first order vanishes for constant u") {
    const BoundaryProfile f(disk(), [](const BoundaryNode& b) { return b.position.y; });
    const ScalarField a = dirichlet_beltrami_first_order(disk(), ScalarField(box(), 3.0), f, 0.0);
    const ScalarField b = dirichlet_beltrami_first_order(disk(), ScalarField(box(), 3.0), f, 0.2);
    CHECK((a - b).max_abs() < 1e-12);
}

TEST_CASE("first-order solvers are linear in the data") {
    const auto u = ScalarField::sample(box(), [](Point p) { return 1.0 + p.x; });
    const BoundaryProfile f1(disk(), [](const BoundaryNode& b) { return b.position.x; });
    const BoundaryProfile f2(disk(), [](const BoundaryNode& b) { return b.position.y * b.position.y; });
    BoundaryProfile sum = f1;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = 2.0 * f1[i] + f2[i];
    const ScalarField lhs = dirichlet_schrodinger_first_order(disk(), u, sum, 0.1);
    const ScalarField rhs = 2.0 * dirichlet_schrodinger_first_order(disk(), u, f1, 0.1) +
                            dirichlet_schrodinger_first_order(disk(), u, f2, 0.1);
    CHECK((lhs - rhs).max_abs() < 1e-8);
}

TEST_CASE("green area moments") {
    for (int n : {0, 1, 2, 3, 4}) {
        for (double r : {0.0, 0.3, 0.6, 0.7}) {
            const GreenAreaMoment g = green_area_moment(disk(), {r * 0.6, r * 0.8}, n);
            CAPTURE(n);
            CAPTURE(r);
            CHECK(std::abs(g.quadrature - g.closed_form) <= 0.01 * std::abs(g.closed_form));
        }
    }
    const GreenAreaMoment g0 = green_area_moment(disk(), {0, 0}, 0);
    CHECK(g0.quadrature == doctest::Approx(-0.25).epsilon(0.005));
    double prev = 1.0;
    for (double r : {0.8, 0.9, 0.94}) {
        const GreenAreaMoment edge = green_area_moment(disk(), {r, 0}, 1);
        CHECK(std::abs(edge.quadrature) < prev);
        prev = std::abs(edge.quadrature);
    }
    CHECK(prev < 0.015);
    const GridDomain other = make_disk({0, 0}, 0.8, box());
    CHECK_THROWS_AS(green_area_moment(other, {0, 0}, 0), Error);
}

TEST_CASE("linearization bound") {
    const BoundaryProfile one(disk(), [](const BoundaryNode&) { return 1.0; });
    const LinearizationBound b = linearization_bound_check(disk(), ScalarField(box(), 1.0), one);
    CHECK(b.probes.size() == 16);
    CHECK(b.worst_ratio <= 1.0);
    const LinearizationBound b4 = linearization_bound_check(disk(), ScalarField(box(), 4.0), one);
    for (std::size_t i = 0; i < b.bound.size(); ++i) CHECK(b4.bound[i] == doctest::Approx(4.0 * b.bound[i]));
    CHECK(b4.worst_ratio == doctest::Approx(b.worst_ratio));
    const BoundaryProfile zero(disk(), [](const BoundaryNode&) { return 0.0; });
    const LinearizationBound bz = linearization_bound_check(disk(), ScalarField(box(), 1.0), zero);
    for (std::size_t i = 0; i < bz.bound.size(); ++i) {
        CHECK(bz.bound[i] == 0.0);
        CHECK(bz.variation[i] == 0.0);
    }
}

TEST_CASE("green l2 norm of the centred disk function") {
    // integral over the unit disk of (ln r / 2 pi)^2 = 1 / (8 pi)
    const GreenSolution g = green(OperatorDesc::laplace(), disk(), {0, 0});
    CHECK(green_l2_norm(g) == doctest::Approx(std::sqrt(1.0 / (8.0 * pi))).epsilon(2e-3));
}
