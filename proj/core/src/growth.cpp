#include "egrowth/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace egrowth {

namespace {

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

void require_inside_grid(const GridDomain& D) {
    const GridSpec& s = D.spec();
    const double margin = 3.0 * s.h;
    const Point top = s.upper();
    for (const auto& b : D.boundary()) {
        const Point p = b.position;
        if (p.x - s.origin.x < margin || top.x - p.x < margin || p.y - s.origin.y < margin || top.y - p.y < margin) {
            throw Error(ErrorCode::out_of_bounds, "interface is within three cells of the grid edge");
        }
    }
}

MomentSample sample_of(const GrowthState& s) {
    MomentSample m;
    m.step = s.step;
    m.t = s.t;
    m.area = s.D.area();
    for (int n = 0; n <= 4; ++n) m.moments[static_cast<std::size_t>(n)] = harmonic_moment(s.D, n);
    const GridSpec& g = s.D.spec();
    for (int n = 0; n <= 4; ++n) {
        const ScalarField f = ScalarField::sample(g, [n](Point p) { return std::pow(norm(p), n); });
        m.abs_moments[static_cast<std::size_t>(n)] = integrate(f, s.D);
    }
    for (const auto& phi : s.test_functions) m.test_integrals.push_back(integrate(phi, s.D));
    return m;
}

/// Godunov |grad phi| with second-order ENO one-sided differences.
double upwind_gradient(const std::vector<double>& phi, const GridSpec& g, int i, int j, double F) {
    const double h = g.h;
    auto at = [&](int ii, int jj) {
        ii = std::clamp(ii, 0, g.nx - 1);
        jj = std::clamp(jj, 0, g.ny - 1);
        return phi[g.index(ii, jj)];
    };
    auto one_sided = [&](int dx, int dy, double& minus, double& plus) {
        const double pm2 = at(i - 2 * dx, j - 2 * dy), pm1 = at(i - dx, j - dy), p0 = at(i, j);
        const double pp1 = at(i + dx, j + dy), pp2 = at(i + 2 * dx, j + 2 * dy);
        const double dm = (pm2 - 2 * pm1 + p0) / (h * h);
        const double d0 = (pm1 - 2 * p0 + pp1) / (h * h);
        const double dp = (p0 - 2 * pp1 + pp2) / (h * h);
        minus = (p0 - pm1) / h + 0.5 * h * minmod(dm, d0);
        plus = (pp1 - p0) / h - 0.5 * h * minmod(d0, dp);
    };
    double xm, xp, ym, yp;
    one_sided(1, 0, xm, xp);
    one_sided(0, 1, ym, yp);
    double s;
    if (F >= 0.0) {
        s = std::pow(std::max(xm, 0.0), 2) + std::pow(std::min(xp, 0.0), 2) + std::pow(std::max(ym, 0.0), 2) +
            std::pow(std::min(yp, 0.0), 2);
    } else {
        s = std::pow(std::min(xm, 0.0), 2) + std::pow(std::max(xp, 0.0), 2) + std::pow(std::min(ym, 0.0), 2) +
            std::pow(std::max(yp, 0.0), 2);
    }
    return std::sqrt(s);
}

std::vector<double> advect(const GridDomain& D, const BoundaryProfile& v, double dt) {
    const GridSpec& g = D.spec();
    std::vector<double> F(g.size(), 0.0);
    std::vector<std::size_t> active;
    for (const auto& e : D.band()) {
        F[e.node] = D.interpolate_profile(v, e);
        active.push_back(e.node);
    }
    const std::vector<double> phi0(D.phi().begin(), D.phi().end());
    auto stage = [&](const std::vector<double>& in) {
        std::vector<double> out = in;
        for (std::size_t k : active) {
            out[k] = in[k] - dt * F[k] * upwind_gradient(in, g, g.i_of(k), g.j_of(k), F[k]);
        }
        return out;
    };
    const std::vector<double> phi1 = stage(phi0);
    const std::vector<double> phi2 = stage(phi1);
    std::vector<double> out = phi0;
    for (std::size_t k : active) out[k] = 0.5 * (phi0[k] + phi2[k]);
    return out;
}

GrowthState finish_step(const GrowthState& prev, GridDomain next, double dt, double flux, double max_vn, int iters) {
    GrowthState s = prev;
    s.D = std::move(next);
    s.t = prev.t + dt;
    s.step = prev.step + 1;
    MomentSample m = sample_of(s);
    m.rate = dt > 0.0 ? (m.area - prev.moment_log.back().area) / dt : 0.0;
    m.flux = flux;
    m.max_vn = max_vn;
    m.solver_iters = iters;
    s.moment_log.push_back(std::move(m));
    return s;
}

struct Velocity {
    BoundaryProfile v;
    double max_vn = 0.0;
    double flux = 0.0;
    int iters = 0;
};

Velocity velocity_of(const GrowthState& s, const SolverOptions& options) {
    Velocity out;
    SolverReport report;
    out.v = normal_velocity(s, options, &report);
    out.iters = report.iterations;
    out.max_vn = out.v.max_abs();
    out.flux = boundary_integrate(out.v, s.D);
    return out;
}

GrowthState step_with(const GrowthState& state, const Velocity& vel, double dt, const StrongOptions& options) {
    const double h = state.D.spec().h;
    if (vel.max_vn * dt > h * (1.0 + 1e-9)) {
        throw Error(ErrorCode::cfl_violation, "dt exceeds h / max|v_n| = " + std::to_string(h / vel.max_vn));
    }
    std::vector<double> phi = advect(state.D, vel.v, dt);
    if (options.reinit_every > 0 && (state.step + 1) % options.reinit_every == 0) {
        phi = reinitialize(state.D.spec(), phi);
    }
    GridDomain next = GridDomain::from_phi(state.D.spec(), std::move(phi));
    require_inside_grid(next);
    return finish_step(state, std::move(next), dt, vel.flux, vel.max_vn, vel.iters);
}

}  // namespace

GrowthState GrowthState::start(GridDomain D, OperatorDesc op, Point w, double Q, std::vector<ScalarField> test_functions) {
    if (!(Q >= 0.0)) throw Error(ErrorCode::invalid_argument, "negative flow rate (suction) is not supported");
    op.validate(D);
    require_inside_grid(D);
    const GridSpec& g = D.spec();
    if (!g.contains(w, 2 * g.h) || D.phi().empty()) throw Error(ErrorCode::out_of_bounds, "source outside the grid");
    const ScalarField phi(g, std::vector<double>(D.phi().begin(), D.phi().end()));
    if (!(phi.bilinear(w) < 0.0) || D.distance_to_boundary(w) < 3.0 * g.h) {
        throw Error(ErrorCode::singularity_too_close, "source must lie inside the domain, three cells from the boundary");
    }
    for (const auto& f : test_functions) {
        if (!(f.spec() == g)) throw Error(ErrorCode::spec_mismatch, "test function on a different grid");
    }
    GrowthState s;
    s.D = std::move(D);
    s.op = std::move(op);
    s.w = w;
    s.Q = Q;
    s.test_functions = std::move(test_functions);
    s.moment_log.push_back(sample_of(s));
    return s;
}

BoundaryProfile normal_velocity(const GrowthState& state, const SolverOptions& options, SolverReport* report) {
    if (state.Q == 0.0) {
        if (report != nullptr) *report = {};
        return BoundaryProfile(std::vector<double>(state.D.boundary().size(), 0.0));
    }
    const GreenSolution g = green(state.op, state.D, state.w, 1.0, options);
    if (report != nullptr) *report = g.report;
    BoundaryProfile v = normal_derivative(g);
    const auto nodes = state.D.boundary();
    for (std::size_t b = 0; b < nodes.size(); ++b) v[b] *= state.Q * state.op.lambda_at(nodes[b].position);
    return v;
}

GrowthState strong_step(const GrowthState& state, double dt, const StrongOptions& options) {
    if (!(dt >= 0.0)) throw Error(ErrorCode::invalid_argument, "negative time step");
    if (dt == 0.0 || state.Q == 0.0) return finish_step(state, state.D, dt, 0.0, 0.0, 0);
    return step_with(state, velocity_of(state, options.solver), dt, options);
}

GrowthState grow_strong(GrowthState state, double t_end, const StrongOptions& options,
                        const std::function<void(const GrowthState&)>& observer) {
    const double h = state.D.spec().h;
    while (state.t < t_end - 1e-12 * std::max(1.0, t_end)) {
        if (state.Q == 0.0) {
            state = finish_step(state, state.D, t_end - state.t, 0.0, 0.0, 0);
        } else {
            const Velocity vel = velocity_of(state, options.solver);
            const double dt = std::min(options.cfl * h / vel.max_vn, t_end - state.t);
            state = step_with(state, vel, dt, options);
        }
        if (observer) observer(state);
    }
    return state;
}

GrowthState grow_strong_to_area(GrowthState state, double target_area, const StrongOptions& options) {
    if (state.Q <= 0.0) throw Error(ErrorCode::invalid_argument, "area target needs Q > 0");
    const double h = state.D.spec().h;
    for (int guard = 0; guard < 100000; ++guard) {
        const double area = state.moment_log.back().area;
        if (area >= target_area * (1.0 - 1e-6)) return state;
        const Velocity vel = velocity_of(state, options.solver);
        double dt = options.cfl * h / vel.max_vn;
        const double remaining = (target_area - area) / vel.flux;
        if (remaining < 0.05 * dt) return state;
        if (remaining <= dt) dt = remaining;
        else if (remaining < 1.5 * dt) dt = 0.5 * remaining;  // avoid a sliver of a final step
        state = step_with(state, vel, dt, options);
    }
    throw Error(ErrorCode::non_convergence, "area target not reached");
}

GrowthState weak_step(const GrowthState& state, double dt, const SolverOptions& options) {
    if (!(dt >= 0.0)) throw Error(ErrorCode::invalid_argument, "negative time step");
    if (state.op.kind() == OperatorKind::schrodinger) {
        throw Error(ErrorCode::invalid_argument, "weak growth is defined for divergence-form operators only");
    }
    if (dt == 0.0 || state.Q == 0.0) return finish_step(state, state.D, dt, 0.0, 0.0, 0);
    Measure mu = Measure::indicator(state.D);
    mu.add_atom(state.w, state.Q * dt);
    const GridSpec box = balayage_box(mu);
    std::optional<ScalarField> lambda;
    if (state.op.kind() == OperatorKind::beltrami) lambda = transfer(state.op.coefficient(), box);
    const BalayageResult r = partial_balayage(mu, lambda, box, options);
    const ScalarField implicit(box, swept_domain_implicit(r));
    ScalarField local = transfer(implicit, state.D.spec());
    GridDomain next = make_from_implicit(state.D.spec(), local.values());
    // The weak solution is a characteristic function carrying all the mass;
    // shift the contour (a near-distance function) until the areas agree.
    const double target = mu.total_mass();
    for (int it = 0; it < 4; ++it) {
        const double gap = target - next.area();
        if (std::abs(gap) <= 1e-7 * target) break;
        const double shift = gap / next.perimeter();
        for (double& v : local.values()) v -= shift;
        next = make_from_implicit(state.D.spec(), local.values());
    }
    require_inside_grid(next);
    return finish_step(state, std::move(next), dt, state.Q, 0.0, r.iterations);
}

int nesting_violations(const GridDomain& before, const GridDomain& after) {
    const GridSpec& g = before.spec();
    if (!(after.spec() == g)) throw Error(ErrorCode::spec_mismatch, "domains on different grids");
    int bad = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!before.inside(k) || after.inside(k)) continue;
        const int i = g.i_of(k), j = g.j_of(k);
        bool near = false;
        for (int dj = -1; dj <= 1 && !near; ++dj) {
            for (int di = -1; di <= 1 && !near; ++di) {
                const int ii = i + di, jj = j + dj;
                if (ii >= 0 && jj >= 0 && ii < g.nx && jj < g.ny) near = after.inside(g.index(ii, jj));
            }
        }
        if (!near) ++bad;
    }
    return bad;
}

double MomentReport::max_rate_deviation(double expected) const {
    return std::max(std::abs(rate_max - expected), std::abs(rate_min - expected)) / std::abs(expected);
}

MomentReport moment_trace(const GrowthState& state) {
    const auto& log = state.moment_log;
    if (log.size() < 3) throw Error(ErrorCode::invalid_argument, "moment trace needs at least three samples");
    MomentReport r;
    r.samples = static_cast<int>(log.size());
    r.rate_min = std::numeric_limits<double>::infinity();
    r.rate_max = -std::numeric_limits<double>::infinity();
    double total_dt = 0.0;
    for (std::size_t k = 1; k < log.size(); ++k) {
        const double dt = log[k].t - log[k - 1].t;
        if (dt <= 0.0) continue;
        r.rate_min = std::min(r.rate_min, log[k].rate);
        r.rate_max = std::max(r.rate_max, log[k].rate);
        total_dt += dt;
    }
    r.rate_mean = total_dt > 0.0 ? (log.back().area - log.front().area) / total_dt : 0.0;
    const std::complex<double> w(state.w.x, state.w.y);
    for (int n = 0; n <= 4; ++n) {
        const auto idx = static_cast<std::size_t>(n);
        double worst = 0.0;
        for (const auto& m : log) {
            const std::complex<double> expected = log.front().moments[idx] + state.Q * (m.t - log.front().t) * std::pow(w, n);
            worst = std::max(worst, std::abs(m.moments[idx] - expected));
        }
        r.drift[idx] = worst / log.front().abs_moments[idx];
    }
    for (std::size_t f = 0; f < state.test_functions.size(); ++f) {
        const ScalarField& phi = state.test_functions[f];
        const double target = state.Q * phi.bicubic(state.w);
        double scale = 0.0;
        for (std::size_t k = 0; k < phi.size(); ++k) {
            if (state.D.inside(k)) scale = std::max(scale, std::abs(phi[k]));
        }
        scale = std::max(std::abs(target), state.Q * scale);
        double worst = 0.0;
        for (std::size_t k = 1; k < log.size(); ++k) {
            const double dt = log[k].t - log[k - 1].t;
            if (dt <= 0.0) continue;
            const double rate = (log[k].test_integrals[f] - log[k - 1].test_integrals[f]) / dt;
            worst = std::max(worst, std::abs(rate - target));
        }
        r.test_rate_error.push_back(worst / scale);
    }
    return r;
}

std::vector<ScalarField> l_harmonic_test_functions(const OperatorDesc& op, const GridSpec& spec, Point center,
                                                   double radius, const SolverOptions& options) {
    const GridDomain disk = make_disk(center, radius, spec);
    const std::vector<std::function<double(Point)>> data = {
        [](Point) { return 1.0; },
        [](Point p) { return p.x; },
        [](Point p) { return p.y; },
        [](Point p) { return p.x * p.x - p.y * p.y; },
        [](Point p) { return p.x * p.y; },
    };
    std::vector<ScalarField> out;
    for (const auto& f : data) out.push_back(dirichlet_solve(op, disk, f, options));
    return out;
}

double radial_area_rate(const std::function<double(double)>& lambda, double R) {
    if (!(R > 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");
    double prev = lambda(0.0);
    if (!(prev > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be positive");
    constexpr int samples = 400;
    for (int k = 1; k <= samples; ++k) {
        const double v = lambda(R * k / samples);
        if (!(v > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be positive");
        if (v < prev - 1e-12 * std::abs(prev)) {
            throw Error(ErrorCode::hypothesis_violated, "lambda decreases on [0, R]; the rate law needs it nondecreasing");
        }
        prev = v;
    }
    return std::sqrt(lambda(0.0) / lambda(R));
}

double measured_radial_rate(const std::function<double(double)>& u, double R, int n) {
    if (!(R > 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");
    const GridSpec g = GridSpec::square(-1.6 * R, 1.6 * R, n);
    const OperatorDesc op = OperatorDesc::schrodinger(ScalarField::sample(g, [&](Point p) { return u(norm(p)); }));
    const double r0 = 0.97 * R, r1 = 1.03 * R;
    GrowthState s = GrowthState::start(make_disk({0, 0}, r0, g), op, {0, 0}, 1.0);
    s = grow_strong_to_area(std::move(s), pi * r1 * r1);
    const auto& log = s.moment_log;
    return (log.back().area - log.front().area) / (log.back().t - log.front().t);
}

std::vector<double> initial_rate_probe(const std::function<double(Point)>& u, Point w, std::span<const double> radii,
                                       int n) {
    static constexpr double defaults[] = {0.4, 0.2, 0.1};
    if (radii.empty()) radii = defaults;
    std::vector<double> rates;
    for (double R : radii) {
        const GridSpec g = GridSpec::square(-1.6 * R, 1.6 * R, n);
        const GridSpec shifted(g.origin + w, g.h, g.nx, g.ny);
        const OperatorDesc op = OperatorDesc::schrodinger(ScalarField::sample(shifted, u));
        const GridDomain D = make_disk(w, R, shifted);
        const GrowthState s = GrowthState::start(D, op, w, 1.0);
        rates.push_back(boundary_integrate(normal_velocity(s), D));
    }
    return rates;
}

RateVerdict reject_zero_rate_families(std::span<const double> times, std::span<const double> areas) {
    if (times.size() != areas.size() || times.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "need at least two (time, area) samples");
    }
    RateVerdict v;
    v.worst_ratio = std::numeric_limits<double>::infinity();
    const std::size_t n = times.size();
    for (std::size_t k = 0; k < n; ++k) {
        double rate;
        if (n == 2) {
            rate = (areas[1] - areas[0]) / (times[1] - times[0]);
        } else {
            // derivative of the quadratic through three neighbouring samples, evaluated at t_k
            const std::size_t c = std::clamp<std::size_t>(k, 1, n - 2);
            const double t0 = times[c - 1], t1 = times[c], t2 = times[c + 1], t = times[k];
            rate = areas[c - 1] * ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2)) +
                   areas[c] * ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2)) +
                   areas[c + 1] * ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1));
        }
        v.rates.push_back(rate);
        const double ratio = std::abs(rate) / areas[k];
        if (ratio < v.worst_ratio) v.worst_ratio = ratio;
        if (ratio <= 1e-3 && !v.reject) {
            v.reject = true;
            v.reason = "area rate " + std::to_string(rate) + " at t = " + std::to_string(times[k]) +
                       " vanishes; Laplace-Beltrami and Schrodinger growth both have a positive area rate";
        }
    }
    if (!v.reject) v.reason = "area rate stays above 1e-3 of the area";
    return v;
}

RateVerdict reject_zero_rate_families(const std::function<GridDomain(double)>& family, std::span<const double> times) {
    std::vector<double> areas;
    for (double t : times) areas.push_back(family(t).area());
    return reject_zero_rate_families(times, areas);
}

}  // namespace egrowth
