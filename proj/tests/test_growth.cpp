#include "doctest.h"

#include <cmath>

#include "egrowth/growth.hpp"
#include "egrowth/special.hpp"

using namespace egrowth;

namespace {

const GridSpec& box() {
    static const GridSpec s = GridSpec::square(-2.0, 2.0, 256);
    return s;
}

double mode_amplitude(const GridDomain& D, int m) {
    const Point c = D.centroid();
    std::complex<double> acc{0.0, 0.0};
    double total = 0.0;
    for (const auto& b : D.boundary()) {
        const Point d = b.position - c;
        const double r = norm(d);
        const double dtheta = b.ds * std::abs(dot(d, b.normal)) / (r * r);
        acc += r * std::polar(1.0, -m * std::atan2(d.y, d.x)) * dtheta;
        total += dtheta;
    }
    return 2.0 * std::abs(acc) / total;
}

}  // namespace

TEST_CASE("radial laplace growth") {
    GrowthState s = GrowthState::start(make_disk({0, 0}, 1.0, box()), OperatorDesc::laplace(), {0, 0}, 1.0);
    const GridDomain initial = s.D;
    s = grow_strong_to_area(std::move(s), 1.5 * pi);
    const double R = std::sqrt(1.0 + s.t / pi);
    CHECK(std::sqrt(s.D.area() / pi) == doctest::Approx(R).epsilon(0.02));
    double dev = 0.0;
    for (const auto& b : s.D.boundary()) dev = std::max(dev, std::abs(norm(b.position) - R));
    CHECK(dev <= 2.0 * box().h);
    const MomentReport r = moment_trace(s);
    CHECK(r.max_rate_deviation(1.0) < 0.02);
    CHECK(nesting_violations(initial, s.D) == 0);
}

TEST_CASE("zero flow leaves the domain alone") {
    const GrowthState s = GrowthState::start(make_disk({0, 0}, 1.0, box()), OperatorDesc::laplace(), {0, 0}, 0.0);
    const GrowthState next = strong_step(s, 0.1);
    CHECK(symmetric_difference_area(s.D, next.D) == 0.0);
    CHECK(next.t == doctest::Approx(0.1));
    CHECK(weak_step(s, 0.0).D.same_as(s.D));
}

TEST_CASE("suction and oversized steps are refused") {
    CHECK_THROWS_AS(GrowthState::start(make_disk({0, 0}, 1.0, box()), OperatorDesc::laplace(), {0, 0}, -1.0), Error);
    const GrowthState s = GrowthState::start(make_disk({0, 0}, 1.0, box()), OperatorDesc::laplace(), {0, 0}, 1.0);
    try {
        (void)strong_step(s, 1.0);
        FAIL("expected a CFL error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::cfl_violation);
    }
}

TEST_CASE("off-centre star keeps its harmonic moments") {
    const GridDomain star = make_star({0.2, 0.1}, [](double t) { return 0.9 * (1.0 + 0.1 * std::cos(3 * t)); }, box());
    GrowthState s = GrowthState::start(star, OperatorDesc::laplace(), {0, 0}, 1.0);
    const double target = 1.5 * s.D.area();
    s = grow_strong_to_area(std::move(s), target);
    const MomentReport r = moment_trace(s);
    for (int n = 1; n <= 4; ++n) CHECK(r.drift[static_cast<std::size_t>(n)] <= 0.01);
    CHECK(r.max_rate_deviation(1.0) <= 0.02);
}

TEST_CASE("four-fold perturbation decays") {
    const GridDomain petal = make_star({0, 0}, [](double t) { return 1.0 + 0.1 * std::cos(4 * t); }, box());
    GrowthState s = GrowthState::start(petal, OperatorDesc::laplace(), {0, 0}, 1.0);
    std::vector<double> amp{mode_amplitude(s.D, 4)};
    s = grow_strong(std::move(s), 1.5, {}, [&](const GrowthState& st) { amp.push_back(mode_amplitude(st.D, 4)); });
    CHECK(amp.front() == doctest::Approx(0.1).epsilon(0.05));
    for (std::size_t k = 1; k < amp.size(); ++k) CHECK(amp[k] <= amp[k - 1] + 1e-4);
    CHECK(amp.back() < 0.6 * amp.front());
}

TEST_CASE("schrodinger growth is slow") {
    const OperatorDesc op = OperatorDesc::schrodinger(ScalarField(box(), 1.0));
    GrowthState s = GrowthState::start(make_disk({0, 0}, 0.7, box()), op, {0, 0}, 1.0);
    s = grow_strong(std::move(s), 0.4);
    for (std::size_t k = 1; k < s.moment_log.size(); ++k) {
        CHECK(s.moment_log[k].rate > 0.0);
        CHECK(s.moment_log[k].rate <= 1.01);
    }
}

TEST_CASE("beltrami area rate ignores the permeability") {
    const std::vector<std::function<double(Point)>> lambdas = {
        [](Point p) { return 1.0 + 0.3 * p.x * p.x; },
        [](Point p) { return std::exp(2.0 * (p.x * p.x + p.y * p.y)); },
        [](Point p) { return 2.0 + std::sin(p.x + 0.5 * p.y); },
    };
    for (const auto& lam : lambdas) {
        const OperatorDesc op = OperatorDesc::beltrami(ScalarField::sample(box(), lam));
        GrowthState s = GrowthState::start(make_disk({0, 0}, 0.6, box()), op, {0.05, 0}, 1.0);
        s = grow_strong(std::move(s), 0.25);
        CHECK(moment_trace(s).max_rate_deviation(1.0) <= 0.02);
    }
}

TEST_CASE("elliptic test functions grow at the rate phi(w)") {
    const OperatorDesc op = OperatorDesc::beltrami(ScalarField::sample(box(), [](Point p) { return 1.0 + 0.3 * p.x * p.x; }));
    auto tests = l_harmonic_test_functions(op, box(), {0, 0}, 1.7);
    const Point w{0.15, -0.1};
    GrowthState s = GrowthState::start(make_disk({0.1, 0}, 0.7, box()), op, w, 1.0, tests);
    s = grow_strong(std::move(s), 0.5);
    const MomentReport r = moment_trace(s);
    REQUIRE(r.test_rate_error.size() == 5);
    for (double e : r.test_rate_error) CHECK(e < 0.03);
}

TEST_CASE("weak step of a disk with a centred source") {
    const GrowthState s = GrowthState::start(make_disk({0, 0}, 0.8, box()), OperatorDesc::laplace(), {0, 0}, 1.0);
    const GrowthState next = weak_step(s, 0.6);
    CHECK(next.D.area() == doctest::Approx(pi * 0.64 + 0.6).epsilon(0.01));
    CHECK(next.D.area() == doctest::Approx(s.D.area() + 0.6).epsilon(1e-6));
    CHECK(norm(next.D.centroid()) < box().h);
    CHECK(nesting_violations(s.D, next.D) == 0);
    CHECK_THROWS_AS(weak_step(GrowthState::start(s.D, OperatorDesc::schrodinger(ScalarField(box(), 1.0)), {0, 0}, 1.0), 0.1),
                    Error);
}

TEST_CASE("strong and weak growth agree") {
    const GridDomain star = make_star({0.1, 0}, [](double t) { return 0.8 * (1.0 + 0.08 * std::cos(3 * t)); }, box());
    const GrowthState s0 = GrowthState::start(star, OperatorDesc::laplace(), {0.05, 0}, 1.0);
    const GrowthState strong = grow_strong(s0, 1.0);
    const GrowthState weak = weak_step(s0, 1.0);
    CHECK(symmetric_difference_area(strong.D, weak.D) <= 5.0 * box().h * strong.D.perimeter());
}

TEST_CASE("radial rate law") {
    CHECK(radial_area_rate([](double) { return 3.0; }, 1.0) == doctest::Approx(1.0));
    CHECK(radial_area_rate([](double r) { return std::pow(bessel_i0(r), 2); }, 1.0) ==
          doctest::Approx(0.7898483148).epsilon(1e-9));
    CHECK(radial_area_rate([](double r) { return std::exp(2 * r * r); }, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    try {
        (void)radial_area_rate([](double r) { return 2.0 - r; }, 1.0);
        FAIL("expected a refusal");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::hypothesis_violated);
    }
    CHECK(measured_radial_rate([](double) { return 1.0; }, 0.5) == doctest::Approx(1.0 / bessel_i0(0.5)).epsilon(0.02));
}

TEST_CASE("initial rate probe") {
    const auto zero = initial_rate_probe([](Point) { return 0.0; }, {0, 0});
    for (double r : zero) CHECK(r == doctest::Approx(1.0).epsilon(0.01));
    const auto one = initial_rate_probe([](Point) { return 1.0; }, {0, 0});
    const double radii[] = {0.4, 0.2, 0.1};
    for (std::size_t k = 0; k < one.size(); ++k) {
        CHECK(one[k] == doctest::Approx(1.0 / bessel_i0(radii[k])).epsilon(0.02));
        CHECK(one[k] > 0.0);
        CHECK(one[k] <= 1.0);
        if (k > 0) CHECK(one[k] > one[k - 1]);
    }
}

TEST_CASE("zero-rate families are rejected") {
    const std::vector<double> times = {0.0, 0.01, 0.02, 0.05, 0.1};
    const auto ellipse = [](double t) { return make_ellipse({0, 0}, 1.0, std::sqrt(1.0 - 0.25 * t * t), box()); };
    CHECK(reject_zero_rate_families(ellipse, times).reject);
    const std::vector<double> constant(times.size(), 2.0);
    CHECK(reject_zero_rate_families(times, constant).reject);
    std::vector<double> grown;
    for (double t : times) grown.push_back(pi + t);
    CHECK_FALSE(reject_zero_rate_families(times, grown).reject);
}
