#include "doctest.h"

#include <cmath>

#include "egrowth/inverse.hpp"
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

const ScalarField& unit() {
    static const ScalarField f(box(), 1.0);
    return f;
}

double max_gap(const BoundaryProfile& a, const BoundaryProfile& b) {
    double g = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!std::isnan(a[k]) && !std::isnan(b[k])) g = std::max(g, std::abs(a[k] - b[k]));
    }
    return g;
}

}  // namespace

TEST_CASE("forward operator basics") {
    const ForwardOperator A(disk(), {0, 0});
    CHECK(A.apply(ScalarField(box())).max_abs() == 0.0);

    const ScalarField u = ScalarField::sample(box(), [](Point p) { return 1.0 + p.x * p.x; });
    const ScalarField v = ScalarField::sample(box(), [](Point p) { return std::sin(p.y); });
    const BoundaryProfile au = A.apply(u), av = A.apply(v);
    const BoundaryProfile combo = A.apply(2.0 * u + (-3.0) * v);
    double worst = 0.0;
    for (std::size_t b = 0; b < au.size(); ++b) worst = std::max(worst, std::abs(combo[b] - (2 * au[b] - 3 * av[b])));
    CHECK(worst <= 1e-10 * combo.max_abs());

    const BoundaryProfile coef = normal_variation_schrodinger_coefficient(disk(), u, {0, 0});
    CHECK(max_gap(coef, au) <= 1e-6);
}

TEST_CASE("least-squares preimage of low modes") {
    const ForwardOperator A(disk(), {0, 0});
    const auto modes = fourier_modes(disk(), 3);
    for (int k = 1; k <= 3; ++k) {
        const PreimageResult r = least_squares_preimage(A, modes[static_cast<std::size_t>(2 * k - 1)]);
        CHECK(r.relative_residual() <= 0.05);
    }
}

TEST_CASE("pumping at the centre of a disk") {
    const ScalarField lambdas[] = {
        unit(),
        ScalarField::sample(box(), [](Point p) { return std::exp(2.0 * (p.x * p.x + p.y * p.y)); }),
        ScalarField::sample(box(), [](Point p) { return 1.0 + p.x * p.x + p.y * p.y; }),
    };
    std::vector<BoundaryProfile> profiles;
    for (const auto& lam : lambdas) {
        profiles.push_back(pumping_response(lam, disk(), {0, 0}));
        for (std::size_t b = 0; b < profiles.back().size(); ++b) {
            CHECK(profiles.back()[b] == doctest::Approx(1.0 / two_pi).epsilon(0.02));
        }
        CHECK(boundary_integrate(profiles.back(), disk()) == doctest::Approx(1.0).epsilon(0.02));
    }
    CHECK(max_gap(profiles[0], profiles[1]) <= 0.02 / two_pi);
    CHECK(max_gap(profiles[0], profiles[2]) <= 0.02 / two_pi);
}

TEST_CASE("direct DtN on the unit disk") {
    const auto modes = fourier_modes(disk(), 3);
    for (int n = 1; n <= 3; ++n) {
        const BoundaryProfile& f = modes[static_cast<std::size_t>(2 * n - 1)];
        const BoundaryProfile N = dtn_direct(unit(), disk(), f);
        double worst = 0.0;
        for (std::size_t b = 0; b < f.size(); ++b) worst = std::max(worst, std::abs(N[b] - n * f[b]));
        CHECK(worst <= 0.03 * n);
    }
    const ScalarField lam = ScalarField::sample(box(), [](Point p) { return 1.0 + 0.3 * p.x * p.x; });
    CHECK(dtn_direct(lam, disk(), modes[0]).max_abs() <= 0.03);
    for (const auto& f : modes) CHECK(power_functional(lam, disk(), f) >= -1e-9);
}

TEST_CASE("response DtN matches the direct map") {
    const ResponseDtN response(unit(), disk(), ProbeSet::every(disk(), 3));
    const auto modes = fourier_modes(disk(), 3);
    CHECK(response.apply(modes[0]).max_abs() <= 0.03);
    for (int n = 1; n <= 3; ++n) {
        const BoundaryProfile& f = modes[static_cast<std::size_t>(2 * n - 1)];
        const BoundaryProfile direct = dtn_direct(unit(), disk(), f);
        CHECK(max_gap(response.apply(f), direct) <= 0.03 * direct.max_abs());
        const BoundaryProfile analytic(disk(), [&](const BoundaryNode& b) { return n * std::cos(n * std::atan2(b.position.y, b.position.x)); });
        CHECK(max_gap(response.apply(f), analytic) <= 0.03 * n);
    }
    ProbeSet shallow = ProbeSet::every(disk(), 10);
    shallow.depths = {2.0, 3.0, 4.0};
    CHECK_THROWS_AS(ResponseDtN(unit(), disk(), shallow), Error);
}

TEST_CASE("DtN matrix") {
    const DtNMatrix m = dtn_matrix(unit(), disk(), 6);
    REQUIRE(m.matrix.size() == 13);
    CHECK(m.symmetry_defect() <= 0.02);
    for (int n = 1; n <= 3; ++n) {
        const auto i = static_cast<std::size_t>(2 * n - 1);
        CHECK(m.matrix[i][i] == doctest::Approx(n * pi).epsilon(0.03));
    }
    CHECK(m.to_csv().rfind("mode,1,cos1,sin1", 0) == 0);
    CHECK_THROWS_AS(dtn_matrix(unit(), disk(), 7), Error);
}

TEST_CASE("two-point response harness") {
    const ScalarField lam2 = ScalarField::sample(box(), [](Point p) { return std::exp(2.0 * (p.x * p.x + p.y * p.y)); });
    const TwoPointReport same = two_point_response_experiment(lam2, lam2, disk(), {0, 0}, {0.3, 0.2});
    CHECK(same.gap_w == 0.0);
    CHECK(same.gap_xi == 0.0);
    const TwoPointReport r = two_point_response_experiment(unit(), lam2, disk(), {0, 0}, {0.3, 0.2});
    const TwoPointReport swapped = two_point_response_experiment(unit(), lam2, disk(), {0.3, 0.2}, {0, 0});
    CHECK(r.gap_w == swapped.gap_xi);
    CHECK(r.gap_xi == swapped.gap_w);
    CHECK(r.gap_xi > 10.0 * r.gap_w);
}
