#include "doctest.h"

#include <cmath>

#include "egrowth/grid.hpp"

using namespace egrowth;

namespace {

GridSpec unit_box(int n = 256) { return GridSpec::square(-2.0, 2.0, n); }

}  // namespace

TEST_CASE("disk area and perimeter") {
    const GridDomain d = make_disk({0, 0}, 1.0, unit_box());
    CHECK(std::abs(d.area() - pi) / pi < 0.005);
    CHECK(std::abs(d.perimeter() - two_pi) / two_pi < 0.01);
    for (const auto& b : d.boundary()) {
        CHECK(std::abs(norm(b.normal) - 1.0) < 1e-12);
        CHECK(std::abs(norm(b.position) - 1.0) < 0.5 * d.spec().h);
    }
    const BoundaryProfile ones(d, [](const BoundaryNode&) { return 1.0; });
    CHECK(std::abs(boundary_integrate(ones, d) - two_pi) / two_pi < 0.01);
}

TEST_CASE("mask matches phi and stays off the outer rings") {
    const GridDomain d = make_ellipse({0.1, -0.2}, 1.2, 0.8, unit_box(128));
    const auto& s = d.spec();
    for (std::size_t k = 0; k < s.size(); ++k) {
        REQUIRE(d.inside(k) == (d.phi(k) < 0.0));
        const int i = s.i_of(k), j = s.j_of(k);
        if (i < 2 || j < 2 || i >= s.nx - 2 || j >= s.ny - 2) CHECK_FALSE(d.inside(k));
    }
}

TEST_CASE("disk masks are nested") {
    const auto s = unit_box(128);
    const GridDomain small = make_disk({0.1, 0}, 0.5, s);
    const GridDomain big = make_disk({0.1, 0}, 1.0, s);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (small.inside(k)) CHECK(big.inside(k));
    }
}

TEST_CASE("disk constructor preconditions") {
    CHECK_THROWS_AS(make_disk({0, 0}, 2.5, unit_box(64)), Error);
    CHECK_THROWS_AS(make_ellipse({0, 0}, 0.0, 1.0, unit_box(64)), Error);
}

TEST_CASE("ellipse with equal axes is the disk") {
    const auto s = unit_box(128);
    const GridDomain e = make_ellipse({0, 0}, 1.0, 1.0, s);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    for (std::size_t k = 0; k < s.size(); ++k) REQUIRE(e.inside(k) == d.inside(k));
}

TEST_CASE("ellipse area") {
    const GridDomain e = make_ellipse({0, 0}, 1.2, 1.0, unit_box());
    CHECK(std::abs(e.area() - pi * 1.2) / (pi * 1.2) < 0.01);
}

TEST_CASE("integration oracles") {
    const auto s = unit_box();
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    CHECK(std::abs(integrate(ScalarField(s, 1.0), d) - pi) < 0.005 * pi);
    CHECK(integrate(ScalarField(s, 0.0), d) == 0.0);
    const auto fx = ScalarField::sample(s, [](Point p) { return p.x; });
    CHECK(std::abs(integrate(fx, d)) < 1e-3 * pi);
}

TEST_CASE("integration is linear") {
    const auto s = unit_box(96);
    const GridDomain d = make_disk({0.2, 0.1}, 0.9, s);
    const auto f = ScalarField::sample(s, [](Point p) { return std::sin(p.x) + p.y * p.y; });
    const auto g = ScalarField::sample(s, [](Point p) { return std::exp(p.x * p.y); });
    const double lhs = integrate(2.0 * f + g, d);
    const double rhs = 2.0 * integrate(f, d) + integrate(g, d);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
}

TEST_CASE("integration converges at second order") {
    const Point c{0.13, -0.07};
    const double r = 0.93;
    auto fn = [](Point p) { return std::exp(p.x) * std::cos(p.y); };
    // exp(x)cos(y) is harmonic, so its mean over a disk is its centre value.
    const double exact = pi * r * r * std::exp(c.x) * std::cos(c.y);
    auto err = [&](int n) {
        const auto s = unit_box(n);
        return std::abs(integrate(ScalarField::sample(s, fn), make_disk(c, r, s)) - exact);
    };
    double ratio = 0.0;
    for (int n : {129, 257}) {
        const double e1 = err(n);
        const double e2 = err(2 * n - 1);
        ratio = std::max(ratio, e1 / e2);
        MESSAGE("n=" << n << " err " << e1 << " -> " << e2);
    }
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 5.0);
}

TEST_CASE("harmonic moments") {
    const auto s = unit_box();
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    CHECK(std::abs(harmonic_moment(d, 0).real() - pi) < 0.005 * pi);
    CHECK(std::abs(harmonic_moment(d, 1)) < 1e-3);
    const Point c{0.3, -0.2};
    const double r = 0.8;
    const GridDomain dc = make_disk(c, r, s);
    const std::complex<double> want = to_complex(c) * pi * r * r;
    CHECK(std::abs(harmonic_moment(dc, 1) - want) < 0.01 * std::abs(want));
    CHECK_THROWS_AS(harmonic_moment(d, 9), Error);
}

TEST_CASE("implicit reinitialization keeps the zero set") {
    const auto s = unit_box(128);
    std::vector<double> f(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        const Point p = s.node(k);
        f[k] = 3.0 * (p.x * p.x + p.y * p.y - 1.0);  // not a distance
    }
    const GridDomain d = make_from_implicit(s, f);
    const GridDomain ref = make_disk({0, 0}, 1.0, s);
    for (std::size_t k = 0; k < s.size(); ++k) {
        REQUIRE(d.inside(k) == ref.inside(k));
        if (std::abs(ref.phi(k)) < 0.5) CHECK(std::abs(d.phi(k) - ref.phi(k)) < 0.02 * s.h + 1e-3);
    }
}
