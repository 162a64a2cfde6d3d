#include "egrowth/acceptance.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <sstream>

#include <json.hpp>

#include "egrowth/balayage.hpp"
#include "egrowth/dirichlet_perturb.hpp"
#include "egrowth/green.hpp"
#include "egrowth/growth.hpp"
#include "egrowth/inverse.hpp"
#include "egrowth/perturbation.hpp"
#include "egrowth/special.hpp"

namespace egrowth {

namespace {

using cd = std::complex<double>;

class Recorder {
public:
    explicit Recorder(CriterionResult& r) : r_(r) { r_.pass = true; }

    double metric(const std::string& name, double v) {
        r_.metrics.emplace_back(name, v);
        return v;
    }
    void require(bool ok, const std::string& what) {
        if (ok) return;
        r_.pass = false;
        if (!r_.detail.empty()) r_.detail += "; ";
        r_.detail += what;
    }

private:
    CriterionResult& r_;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

double disk_green(Point xi, Point z0) {
    const cd x = to_complex(xi), z = to_complex(z0);
    return std::log(std::abs((x - z) / (1.0 - std::conj(z) * x))) / two_pi;
}

double green_probe_error(const GridSpec& s, Point w, double clearance_cells) {
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const GreenSolution g = green(OperatorDesc::laplace(), d, w);
    const double c = clearance_cells * s.h;
    double err = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!d.inside(k) || d.phi(k) > -c || distance(s.node(k), w) < c) continue;
        err = std::max(err, std::abs(g.total[k] - disk_green(s.node(k), w)));
    }
    return err;
}

// Off-lattice probes so both grids are sampled through interpolation.
double green_ring_error(int n, Point w) {
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

void green_closed_form(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const double err = rec.metric("max_error", green_probe_error(s, {0.3, 0.2}, 5.0));
    rec.require(err <= 1e-3, "max error " + fmt(err) + " > 1e-3");
    const double e1 = rec.metric("coarse_error", green_ring_error(n / 2 + 1, {-0.2, 0.25}));
    const double e2 = rec.metric("fine_error", green_ring_error(n + 1, {-0.2, 0.25}));
    const double order = rec.metric("order", std::log2(e1 / e2));
    rec.require(order >= 1.8, "refinement order " + fmt(order) + " < 1.8");
}

void green_area(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    double worst = 0.0;
    for (int m : {0, 1, 2}) {
        for (double r : {0.0, 0.3, 0.6}) {
            const GreenAreaMoment g = green_area_moment(d, {r, 0.0}, m);
            const double rel = std::abs(g.quadrature - g.closed_form) / std::abs(g.closed_form);
            worst = std::max(worst, rel);
            rec.require(rel <= 0.01, "n=" + std::to_string(m) + " |z|=" + fmt(r) + " off by " + fmt(100 * rel) + "%");
        }
    }
    rec.metric("worst_relative_error", worst);
}

void dirichlet_rows(Recorder& rec, int n) {
    double helm = 0.0, belt = 0.0;
    for (const GoldenRow& row : dirichlet_goldens(n)) {
        if (row.input.rfind("green_area", 0) == 0) continue;
        double& worst = row.input.rfind("helmholtz", 0) == 0 ? helm : belt;
        worst = std::max(worst, std::abs(row.computed - row.reference));
        rec.require(row.pass(), row.input + ": computed " + fmt(row.computed) + ", expected " + fmt(row.reference));
    }
    rec.metric("helmholtz_max_error", helm);
    rec.metric("beltrami_max_error", belt);
}

void defect_laws(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const auto u = ScalarField::sample(s, [](Point p) { return 1.0 + p.x * p.x; });
    const auto p = ScalarField::sample(s, [](Point q) { return q.x * q.x + 0.5 * q.y; });
    const auto r2 = ScalarField::sample(s, [](Point q) { return dot(q, q); });
    std::vector<VariationReport> reports;
    reports.push_back(hadamard_defect([&](double e) { return make_disk({0, 0}, 1.0 + e, s); }, {0, 0}, {0.3, 0},
                                      [](const BoundaryNode&) { return 1.0; }, 0.02));
    reports.push_back(schrodinger_series_defect(d, u, {0.1, 0.2}, 0.02));
    for (BeltramiFormula f : {BeltramiFormula::gradient, BeltramiFormula::laplacian}) {
        reports.push_back(beltrami_defect(d, p, {0.1, 0.2}, {-0.3, -0.2}, 0.02, f));
    }
    reports.push_back(normal_schrodinger_defect(d, u, {0.1, 0.2}, 0.05));
    reports.push_back(normal_beltrami_defect(d, r2, {0, 0}, 0.05));
    for (const auto& r : reports) {
        rec.metric(r.name + "_ratio", r.ratio);
        rec.require(r.pass(), r.name + " ratio " + fmt(r.ratio) + " outside [3, 5.5]");
    }
}

void conversion(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const std::pair<const char*, std::function<double(Point)>> cases[] = {
        {"exp(2r^2)", [](Point p) { return std::exp(2.0 * dot(p, p)); }},
        {"I0(r)^2", [](Point p) { return std::pow(bessel_i0(norm(p)), 2); }},
    };
    for (const auto& [name, fn] : cases) {
        const ConversionResult c = convert_beltrami_to_schrodinger(ScalarField::sample(s, fn), d, {0.2, 0.1});
        const double rel = rec.metric(std::string(name) + "_relative_gap", c.discrepancy / c.scale);
        rec.require(rel <= 1e-3, std::string(name) + " gap " + fmt(rel) + " of scale");
    }
}

void moment_conservation(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    {
        const GridDomain star = make_star({0.2, 0.1}, [](double t) { return 0.9 * (1.0 + 0.1 * std::cos(3 * t)); }, s);
        GrowthState st = GrowthState::start(star, OperatorDesc::laplace(), {0, 0}, 1.0);
        st = grow_strong_to_area(std::move(st), 1.5 * st.D.area());
        const MomentReport m = moment_trace(st);
        for (int k = 1; k <= 4; ++k) {
            const double drift = rec.metric("laplace_drift_t" + std::to_string(k), m.drift[static_cast<std::size_t>(k)]);
            rec.require(drift <= 0.01, "t" + std::to_string(k) + " drift " + fmt(drift));
        }
        const double dev = rec.metric("laplace_rate_deviation", m.max_rate_deviation(1.0));
        rec.require(dev <= 0.02, "laplace rate off by " + fmt(100 * dev) + "%");
    }
    {
        const OperatorDesc op = OperatorDesc::beltrami(ScalarField::sample(s, [](Point p) { return 1.0 + 0.3 * p.x * p.x; }));
        GrowthState st = GrowthState::start(make_disk({0, 0}, 0.6, s), op, {0.05, 0}, 1.0);
        st = grow_strong(std::move(st), 0.25);
        const double dev = rec.metric("beltrami_rate_deviation", moment_trace(st).max_rate_deviation(1.0));
        rec.require(dev <= 0.02, "beltrami rate off by " + fmt(100 * dev) + "%");
    }
    {
        GrowthState st = GrowthState::start(make_disk({0, 0}, 0.7, s), OperatorDesc::schrodinger(ScalarField(s, 1.0)), {0, 0}, 1.0);
        st = grow_strong(std::move(st), 0.4);
        double lo = 1e300, hi = -1e300;
        for (std::size_t k = 1; k < st.moment_log.size(); ++k) {
            lo = std::min(lo, st.moment_log[k].rate);
            hi = std::max(hi, st.moment_log[k].rate);
        }
        rec.metric("schrodinger_rate_min", lo);
        rec.metric("schrodinger_rate_max", hi);
        rec.require(lo > 0.0 && hi <= 1.0, "schrodinger rates span [" + fmt(lo) + ", " + fmt(hi) + "]");
    }
}

void radial_rates(Recorder& rec, int n) {
    const std::function<double(double)> helmholtz = [](double) { return 1.0; };
    const std::function<double(double)> quadratic = [](double r) { return 4.0 * (r * r + 1.0); };
    for (double R : {0.5, 1.0}) {
        const double a = measured_radial_rate(helmholtz, R, n), ea = 1.0 / bessel_i0(R);
        const double b = measured_radial_rate(quadratic, R, n), eb = std::exp(-R * R);
        const double da = rec.metric("bessel_R" + fmt(R) + "_relative_error", std::abs(a - ea) / ea);
        const double db = rec.metric("gaussian_R" + fmt(R) + "_relative_error", std::abs(b - eb) / eb);
        rec.require(da <= 0.02, "u=1 at R=" + fmt(R) + ": " + fmt(a) + " vs " + fmt(ea));
        rec.require(db <= 0.02, "u=4(r^2+1) at R=" + fmt(R) + ": " + fmt(b) + " vs " + fmt(eb));
    }
    const std::pair<const char*, std::function<double(Point)>> potentials[] = {
        {"u=1", [](Point) { return 1.0; }},
        {"u=4(r^2+1)", [](Point p) { return 4.0 * (dot(p, p) + 1.0); }},
    };
    const std::array<double, 3> radii = {0.4, 0.2, 0.1};
    for (const auto& [name, u] : potentials) {
        const std::vector<double> rates = initial_rate_probe(u, {0, 0}, radii, n);
        bool ok = true;
        for (std::size_t k = 0; k < rates.size(); ++k) {
            ok = ok && rates[k] > 0.0 && rates[k] <= 1.0 && (k == 0 || rates[k] > rates[k - 1]);
        }
        rec.metric(std::string(name) + "_probe_R0.1", rates.back());
        rec.require(ok, std::string(name) + " initial rates not increasing toward 1");
    }
}

double density_gap(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s * a.spec().h * a.spec().h;
}

Measure atoms(const GridSpec& s, std::initializer_list<Atom> list) {
    Measure mu;
    mu.density = ScalarField(s);
    for (const Atom& a : list) mu.add_atom(a.position, a.mass);
    return mu;
}

void balayage(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const double t = pi / 4;
    const Measure mu = atoms(s, {{{0, 0}, t}});
    const BalayageResult r = partial_balayage(mu, std::nullopt, s);
    const GridDomain disk = make_disk({0, 0}, std::sqrt(t / pi), s);
    const GridDomain swept = make_from_implicit(s, swept_domain_implicit(r));
    const double limit = 3.0 * s.h * disk.perimeter();
    const double sd = rec.metric("disk_symmetric_difference", symmetric_difference_area(swept, disk));
    rec.metric("disk_limit", limit);
    rec.require(sd <= limit, "swept disk symmetric difference " + fmt(sd) + " > " + fmt(limit));
    const double comp = rec.metric("complementarity", r.complementarity_residual());
    rec.require(comp <= 1e-6, "complementarity residual " + fmt(comp));
    const double mass = rec.metric("mass_error", r.mass_error());
    rec.require(mass <= 5e-3, "mass error " + fmt(mass));
    const double scale = r.potential.field.max_abs();
    const double gap = rec.metric("exterior_gap", quadrature_domain_check(mu, r));
    rec.require(gap <= 1e-3 * scale, "exterior potential gap " + fmt(gap) + " vs scale " + fmt(scale));

    const Measure both = atoms(s, {{{-0.3, 0.0}, 0.3}, {{0.3, 0.1}, 0.4}});
    const BalayageResult direct = partial_balayage(both, std::nullopt, s);
    const BalayageResult first = partial_balayage(atoms(s, {{{-0.3, 0.0}, 0.3}}), std::nullopt, s);
    Measure staged;
    staged.density = first.result_density;
    staged.add_atom({0.3, 0.1}, 0.4);
    const BalayageResult second = partial_balayage(staged, std::nullopt, s);
    const GridDomain region = make_from_implicit(s, swept_domain_implicit(direct));
    const double sup = rec.metric("superposition_difference", density_gap(direct.result_density, second.result_density));
    const double sup_limit = 5.0 * s.h * region.perimeter();
    rec.require(sup <= sup_limit, "superposition difference " + fmt(sup) + " > " + fmt(sup_limit));
}

void coincidence(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const GridDomain star = make_star({0.1, 0}, [](double t) { return 0.8 * (1.0 + 0.08 * std::cos(3 * t)); }, s);
    const GrowthState s0 = GrowthState::start(star, OperatorDesc::laplace(), {0.05, 0}, 1.0);
    const GrowthState strong = grow_strong(s0, 1.0);
    const GrowthState weak = weak_step(s0, 1.0);
    const double sd = rec.metric("symmetric_difference", symmetric_difference_area(strong.D, weak.D));
    const double limit = rec.metric("limit", 5.0 * s.h * strong.D.perimeter());
    rec.require(sd <= limit, "symmetric difference " + fmt(sd) + " > " + fmt(limit));
}

void inverse_maps(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    const ScalarField unit(s, 1.0);
    const auto modes = fourier_modes(d, 3);
    const ResponseDtN response(unit, d, ProbeSet::every(d, 3));
    for (int m = 1; m <= 3; ++m) {
        const BoundaryProfile& f = modes[static_cast<std::size_t>(2 * m - 1)];
        const BoundaryProfile direct = dtn_direct(unit, d, f);
        const BoundaryProfile resp = response.apply(f);
        const auto nodes = d.boundary();
        double err = 0.0, gap = 0.0;
        for (std::size_t b = 0; b < nodes.size(); ++b) {
            const double exact = m * std::cos(m * std::atan2(nodes[b].position.y, nodes[b].position.x));
            err = std::max(err, std::abs(direct[b] - exact));
            if (!std::isnan(resp[b])) gap = std::max(gap, std::abs(resp[b] - direct[b]));
        }
        const std::string tag = "cos" + std::to_string(m);
        err = rec.metric(tag + "_direct_relative_error", err / m);
        gap = rec.metric(tag + "_response_relative_gap", gap / direct.max_abs());
        rec.require(err <= 0.03, tag + " dtn_direct off by " + fmt(100 * err) + "%");
        rec.require(gap <= 0.03, tag + " response vs direct off by " + fmt(100 * gap) + "%");
    }
    const double sym = rec.metric("symmetry_defect", dtn_matrix(unit, d, 6).symmetry_defect());
    rec.require(sym <= 0.02, "symmetry defect " + fmt(sym));
    const std::pair<const char*, std::function<double(Point)>> radial[] = {
        {"1", [](Point) { return 1.0; }},
        {"exp(2r^2)", [](Point p) { return std::exp(2.0 * dot(p, p)); }},
        {"1+r^2", [](Point p) { return 1.0 + dot(p, p); }},
        {"I0(r)^2", [](Point p) { return std::pow(bessel_i0(norm(p)), 2); }},
    };
    for (const auto& [name, fn] : radial) {
        const BoundaryProfile v = pumping_response(ScalarField::sample(s, fn), d, {0, 0});
        double worst = 0.0;
        for (std::size_t b = 0; b < v.size(); ++b) worst = std::max(worst, std::abs(v[b] * two_pi - 1.0));
        rec.metric(std::string("pumping_") + name + "_relative_error", worst);
        rec.require(worst <= 0.02, std::string("pumping for lambda=") + name + " off by " + fmt(100 * worst) + "%");
    }
}

void negative_gate(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const std::vector<double> times = {0.0, 0.01, 0.02, 0.05, 0.1};
    const RateVerdict v = reject_zero_rate_families(
        [&](double t) { return make_ellipse({0, 0}, 1.0, std::sqrt(1.0 - 0.25 * t * t), s); }, times);
    rec.metric("worst_ratio", v.worst_ratio);
    rec.require(v.reject, "ellipse family not rejected: " + v.reason);
}

void zero_curvature(Recorder& rec, int n) {
    const auto s = GridSpec::square(-2.0, 2.0, n);
    const ZeroCurvatureReport z = zero_curvature_check(make_disk({0, 0}, 1.0, s), {0.1, 0.2}, {-0.3, 0.1}, {0.2, -0.4});
    rec.metric("abc", z.abc);
    const double gap = rec.metric("max_relative_gap", z.max_relative_gap);
    rec.require(gap <= 1e-10, "relative gap " + fmt(gap));
}

struct Entry {
    const char* name;
    void (*run)(Recorder&, int);
};

constexpr Entry entries[acceptance_criteria] = {
    {"green closed form", green_closed_form},
    {"green area moments", green_area},
    {"dirichlet perturbation references", dirichlet_rows},
    {"defect laws", defect_laws},
    {"beltrami/schrodinger conversion", conversion},
    {"moment conservation and area rates", moment_conservation},
    {"radial rate laws", radial_rates},
    {"balayage", balayage},
    {"strong/weak coincidence", coincidence},
    {"inverse forward maps", inverse_maps},
    {"zero-rate family gate", negative_gate},
    {"zero curvature", zero_curvature},
};

}  // namespace

std::string criterion_name(int id) {
    if (id < 1 || id > acceptance_criteria) throw Error(ErrorCode::invalid_argument, "no criterion " + std::to_string(id));
    return entries[id - 1].name;
}

std::string CriterionResult::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["name"] = name;
    j["pass"] = pass;
    j["detail"] = detail;
    j["seconds"] = seconds;
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [k, v] : metrics) m[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    j["metrics"] = m;
    return j.dump();
}

CriterionResult run_criterion(int id, int n) {
    CriterionResult r;
    r.id = id;
    r.name = criterion_name(id);
    const auto t0 = std::chrono::steady_clock::now();
    Recorder rec(r);
    try {
        entries[id - 1].run(rec, n);
    } catch (const Error& e) {
        rec.require(false, std::string("error: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.pass) r.detail = "all checks within tolerance";
    return r;
}

std::vector<CriterionResult> run_acceptance(int n, const std::vector<int>& selection,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<int> ids = selection;
    if (ids.empty()) {
        for (int i = 1; i <= acceptance_criteria; ++i) ids.push_back(i);
    }
    std::vector<CriterionResult> out;
    for (int id : ids) {
        out.push_back(run_criterion(id, n));
        if (on_result) on_result(out.back());
    }
    return out;
}

}  // namespace egrowth
