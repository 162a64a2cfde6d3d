#include "doctest.h"

#include <cmath>
#include <complex>

#include "egrowth/green.hpp"
#include "egrowth/special.hpp"

using namespace egrowth;
using cd = std::complex<double>;

namespace {

const GridSpec& box256() {
    static const GridSpec s = GridSpec::square(-2.0, 2.0, 256);
    return s;
}

double disk_green(Point xi, Point z0) {
    const cd x = to_complex(xi), z = to_complex(z0);
    return std::log(std::abs((x - z) / (1.0 - std::conj(z) * x))) / two_pi;
}

double max_green_error(int n, Point w) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const GreenSolution g = green(OperatorDesc::laplace(), d, w);
    double err = 0.0;
    for (double r : {0.1, 0.35, 0.6, 0.85}) {
        for (int q = 0; q < 12; ++q) {
            const Point p{r * std::cos(q * pi / 6 + 0.1), r * std::sin(q * pi / 6 + 0.1)};
            if (distance(p, w) < 0.15) continue;
            err = std::max(err, std::abs(g.value_at(p) - disk_green(p, w)));
        }
    }
    return err;
}

}  // namespace

TEST_CASE("log kernel cell average matches fine quadrature") {
    const Point c{0.3, -0.1};
    const double h = 0.05;
    for (Point w : {Point{0.3, -0.1}, Point{0.31, -0.08}, Point{0.4, 0.0}}) {
        double avg = 0.0;
        const int m = 400;
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                const Point z{c.x - 0.5 * h + (a + 0.5) * h / m, c.y - 0.5 * h + (b + 0.5) * h / m};
                avg += log_kernel(z, w);
            }
        }
        avg /= m * m;
        CHECK(log_kernel_cell_average(c, h, w) == doctest::Approx(avg).epsilon(1e-5));
    }
    const Point g = log_kernel_gradient_cell_average(c, h, {0.4, 0.02});
    const Point ex = (1.0 / (two_pi * dot(c - Point{0.4, 0.02}, c - Point{0.4, 0.02}))) * (c - Point{0.4, 0.02});
    CHECK(g.x == doctest::Approx(ex.x).epsilon(0.01));
    CHECK(g.y == doctest::Approx(ex.y).epsilon(0.01));
}

TEST_CASE("laplace green on the unit disk matches the closed form") {
    const GridDomain d = make_disk({0, 0}, 1.0, box256());
    const Point w{0.3, 0.2};
    const GreenSolution g = green(OperatorDesc::laplace(), d, w);
    const double h = box256().h;
    double err = 0.0;
    for (std::size_t k = 0; k < box256().size(); ++k) {
        const Point p = box256().node(k);
        if (!d.inside(k) || d.phi(k) > -5 * h || distance(p, w) < 5 * h) continue;
        err = std::max(err, std::abs(g.total[k] - disk_green(p, w)));
        REQUIRE(g.total[k] <= 0.0);
    }
    MESSAGE("max error " << err << " sweeps " << g.report.iterations);
    CHECK(err <= 1e-3);
}

TEST_CASE("green refinement order") {
    const Point w{-0.2, 0.25};
    const double e1 = max_green_error(129, w);
    const double e2 = max_green_error(257, w);
    MESSAGE("errors " << e1 << " " << e2 << " order " << std::log2(e1 / e2));
    CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("schrodinger with zero potential is laplace") {
    const auto s = GridSpec::square(-2.0, 2.0, 128);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const GreenSolution a = green(OperatorDesc::laplace(), d, {0.1, 0});
    const GreenSolution b = green(OperatorDesc::schrodinger(ScalarField(s)), d, {0.1, 0});
    CHECK((a.total - b.total).max_abs() < 1e-9);
}

TEST_CASE("constant beltrami coefficient scales the green function") {
    const auto s = GridSpec::square(-2.0, 2.0, 128);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const GreenSolution a = green(OperatorDesc::laplace(), d, {0, 0});
    const GreenSolution b = green(OperatorDesc::beltrami(ScalarField(s, 2.0)), d, {0, 0});
    CHECK((0.5 * a.total - b.total).max_abs() < 1e-8);
}

TEST_CASE("green function symmetry for all operator kinds") {
    const auto s = GridSpec::square(-2.0, 2.0, 160);
    const GridDomain d = make_ellipse({0, 0}, 1.2, 0.9, s);
    const auto lambda = ScalarField::sample(s, [](Point p) { return 1.0 + 0.3 * p.x * p.x + 0.2 * p.y; });
    const auto u = ScalarField::sample(s, [](Point p) { return 1.0 + p.x * p.x; });
    const Point z{0.4, 0.1}, w{-0.3, -0.2};
    for (const OperatorDesc& op : {OperatorDesc::laplace(), OperatorDesc::schrodinger(u), OperatorDesc::beltrami(lambda)}) {
        const GreenSolution gz = green(op, d, z);
        const GreenSolution gw = green(op, d, w);
        const double scale = std::max(gz.total.max_abs(), gw.total.max_abs());
        CAPTURE(to_string(op.kind()));
        CHECK(std::abs(gz.value_at(w) - gw.value_at(z)) <= 5e-3 * scale);
    }
}

TEST_CASE("normal derivative of the centred disk green function") {
    const GridDomain d = make_disk({0, 0}, 1.0, box256());
    const GreenSolution g = green(OperatorDesc::laplace(), d, {0, 0});
    const BoundaryProfile dn = normal_derivative(g);
    for (std::size_t b = 0; b < dn.size(); ++b) {
        REQUIRE(dn[b] > 0.0);
        CHECK(std::abs(dn[b] * two_pi - 1.0) < 0.02);
    }
    CHECK(std::abs(boundary_integrate(dn, d) - 1.0) < 0.02);
    const GreenSolution g2 = green(OperatorDesc::laplace(), d, {0.4, -0.3}, 2.0);
    const BoundaryProfile dn2 = normal_derivative(g2);
    CHECK(std::abs(boundary_integrate(dn2, d) - 2.0) < 0.04);
    for (std::size_t b = 0; b < dn2.size(); ++b) REQUIRE(dn2[b] > 0.0);
}

TEST_CASE("poisson kernel on the unit disk") {
    const GridDomain d = make_disk({0, 0}, 1.0, box256());
    const std::size_t zeta = 17;
    const ScalarField p = poisson_kernel(OperatorDesc::laplace(), d, zeta);
    const Point zz = d.boundary()[zeta].position;
    const double h = box256().h;
    double worst = 0.0;
    for (Point z : {Point{0, 0}, Point{0.3, 0.4}, Point{-0.5, 0.1}, Point{0.2, -0.6}, zz * 0.8}) {
        const double exact = (1.0 - dot(z, z)) / (two_pi * dot(zz - z, zz - z));
        worst = std::max(worst, std::abs(p.bicubic(z) - exact) / exact);
    }
    CHECK(worst < 0.03);
    // A point z fixed, zeta varying: harmonic measure has unit mass.
    const Point z{0.25, -0.35};
    BoundaryProfile pz(std::vector<double>(d.boundary().size()));
    const GreenSolution gz = green(OperatorDesc::laplace(), d, z);
    const BoundaryProfile dn = normal_derivative(gz);
    CHECK(std::abs(boundary_integrate(dn, d) - 1.0) < 0.02);
    // Far from zeta the kernel vanishes at the boundary.
    const Point other = -1.0 * zz;
    CHECK(std::abs(p.bicubic(other * (1.0 - 3 * h))) < 0.05 * p.bicubic({0, 0}) + 0.02);
}

TEST_CASE("dirichlet solves") {
    const auto s = GridSpec::square(-2.0, 2.0, 200);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const ScalarField one = dirichlet_solve(OperatorDesc::laplace(), d, [](Point) { return 1.0; });
    const ScalarField q = dirichlet_solve(OperatorDesc::laplace(), d, [](Point p) { return p.x * p.x - p.y * p.y; });
    double e1 = 0.0, e2 = 0.0, lo = 1e9, hi = -1e9;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!d.inside(k)) continue;
        const Point p = s.node(k);
        e1 = std::max(e1, std::abs(one[k] - 1.0));
        e2 = std::max(e2, std::abs(q[k] - (p.x * p.x - p.y * p.y)));
        lo = std::min(lo, q[k]);
        hi = std::max(hi, q[k]);
    }
    CHECK(e1 < 1e-8);
    CHECK(e2 < 1e-3);
    CHECK(hi <= 1.0 + 1e-9);
    CHECK(lo >= -1.0 - 1e-9);
    const ScalarField schr = dirichlet_solve(OperatorDesc::schrodinger(ScalarField(s, 3.0)), d, [](Point) { return 1.0; });
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (d.inside(k)) REQUIRE(std::abs(schr[k]) <= 1.0 + 1e-12);
    }
}

TEST_CASE("normal derivative cross-check") {
    const auto s = GridSpec::square(-2.0, 2.0, 200);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    // f = (1 - r^2)(1 + x) vanishes on the circle.
    auto f = [](Point p) { return (1.0 - dot(p, p)) * (1.0 + p.x); };
    auto lap_f = [](Point p) { return -4.0 * (1.0 + p.x) - 4.0 * p.x; };
    const ScalarField lf = ScalarField::sample(s, lap_f);
    const ScalarField ff = ScalarField::sample(s, f);
    const BoundaryProfile zero(std::vector<double>(d.boundary().size(), 0.0));
    const BoundaryProfile dn = normal_derivative(ff, d, zero);
    double worst = 0.0;
    const std::size_t nb = d.boundary().size();
    for (int q = 0; q < 16; ++q) {
        const std::size_t zeta = static_cast<std::size_t>(q) * nb / 16;
        const ScalarField p = poisson_kernel(OperatorDesc::laplace(), d, zeta);
        const double via_kernel = integrate_against_poisson_kernel(OperatorDesc::laplace(), d, zeta, p, lf);
        worst = std::max(worst, std::abs(dn[zeta] - via_kernel));
    }
    MESSAGE("worst gap " << worst << " of " << dn.max_abs());
    CHECK(worst <= 0.03 * dn.max_abs());
}

TEST_CASE("beltrami to schrodinger potentials") {
    const auto s = box256();
    const auto lam_exp = ScalarField::sample(s, [](Point p) { return std::exp(2.0 * dot(p, p)); });
    const auto lam_bessel = ScalarField::sample(s, [](Point p) {
        const double i0 = bessel_i0(norm(p));
        return i0 * i0;
    });
    const ScalarField u1 = beltrami_potential(lam_exp);
    const ScalarField u2 = beltrami_potential(lam_bessel);
    for (std::size_t k = 0; k < s.size(); ++k) {
        const Point p = s.node(k);
        if (norm(p) > 1.5) continue;
        REQUIRE(std::abs(u1[k] - 4.0 * (dot(p, p) + 1.0)) < 0.01 * 4.0 * (dot(p, p) + 1.0));
        REQUIRE(std::abs(u2[k] - 1.0) < 0.01);
    }
    const ScalarField ones = beltrami_potential(ScalarField(s, 1.0));
    CHECK(ones.max_abs() == 0.0);
}

TEST_CASE("beltrami to schrodinger green identity") {
    const auto s = box256();
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const auto lam = ScalarField::sample(s, [](Point p) { return std::exp(2.0 * dot(p, p)); });
    const ConversionResult r = convert_beltrami_to_schrodinger(lam, d, {0.2, 0.1});
    MESSAGE("discrepancy " << r.discrepancy << " scale " << r.scale);
    CHECK(r.discrepancy <= 1e-3 * r.scale);
    const ConversionResult one = convert_beltrami_to_schrodinger(ScalarField(s, 1.0), d, {0.2, 0.1});
    CHECK(one.discrepancy <= 1e-9);
}

TEST_CASE("green preconditions") {
    const auto s = GridSpec::square(-2.0, 2.0, 64);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    CHECK_THROWS_AS(green(OperatorDesc::laplace(), d, {0.99, 0}), Error);
    CHECK_THROWS_AS(green(OperatorDesc::laplace(), d, {1.5, 0}), Error);
    CHECK_THROWS_AS(OperatorDesc::beltrami(ScalarField(s, 0.0)), Error);
    CHECK_THROWS_AS(green(OperatorDesc::schrodinger(ScalarField(s, -1.0)), d, {0, 0}), Error);
}

TEST_CASE("bessel series") {
    CHECK(bessel_i0(0.0) == 1.0);
    CHECK(1.0 / bessel_i0(1.0) == doctest::Approx(0.7898483148).epsilon(1e-9));
    CHECK(1.0 / bessel_i0(0.5) == doctest::Approx(0.9403061933).epsilon(1e-9));
    CHECK(bessel_i1(1.0) == doctest::Approx(0.5651591040).epsilon(1e-9));
}
