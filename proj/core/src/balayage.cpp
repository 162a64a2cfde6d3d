#include "egrowth/balayage.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "egrowth/green.hpp"

namespace egrowth {

namespace {

constexpr double near_atom_cells = 2.5;

struct Offset {
    int di = 0;
    int dj = 0;
};

Offset lattice_offset(const GridSpec& from, const GridSpec& to) {
    if (std::abs(from.h - to.h) > 1e-12 * from.h) throw Error(ErrorCode::spec_mismatch, "grids have different spacing");
    const double fx = (to.origin.x - from.origin.x) / from.h;
    const double fy = (to.origin.y - from.origin.y) / from.h;
    const double rx = std::round(fx), ry = std::round(fy);
    if (std::abs(fx - rx) > 1e-6 || std::abs(fy - ry) > 1e-6) {
        throw Error(ErrorCode::spec_mismatch, "grids are not lattice aligned");
    }
    return {static_cast<int>(rx), static_cast<int>(ry)};
}

struct Support {
    bool empty = true;
    Point lo{1e300, 1e300};
    Point hi{-1e300, -1e300};
    void add(Point p) {
        empty = false;
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
};

Support support_of(const Measure& mu) {
    Support s;
    if (mu.density.size() > 0) {
        const GridSpec& g = mu.density.spec();
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (mu.density[k] != 0.0) s.add(g.node(k));
        }
    }
    for (const auto& a : mu.atoms) s.add(a.position);
    return s;
}

void require_margin(const Measure& mu, const GridSpec& box) {
    const Support s = support_of(mu);
    if (s.empty) return;
    const Point top = box.upper();
    const double mx = 0.25 * (top.x - box.origin.x);
    const double my = 0.25 * (top.y - box.origin.y);
    if (s.lo.x - box.origin.x < mx - 1e-12 || top.x - s.hi.x < mx - 1e-12 || s.lo.y - box.origin.y < my - 1e-12 ||
        top.y - s.hi.y < my - 1e-12) {
        throw Error(ErrorCode::out_of_bounds, "measure support is closer than 25% of the box width to its edge");
    }
}

bool near_any_atom(const Measure& mu, Point p, double radius) {
    for (const auto& a : mu.atoms) {
        if (distance(p, a.position) < radius) return true;
    }
    return false;
}

/// Far-field values of the density part on the outer ring: complex multipole of
/// weight/lambda about the weighted centroid, truncated once terms fall below 1e-15.
void multipole_ring(const ScalarField& weights, ScalarField& out) {
    const GridSpec& g = weights.spec();
    const double h2 = g.h * g.h;
    double mass = 0.0;
    std::complex<double> c{0.0, 0.0};
    double abs_mass = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double m = weights[k] * h2;
        if (m == 0.0) continue;
        const Point p = g.node(k);
        mass += m;
        abs_mass += std::abs(m);
        c += std::abs(m) * std::complex<double>(p.x, p.y);
    }
    if (abs_mass == 0.0) return;
    c /= abs_mass;
    double rmax = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (weights[k] == 0.0) continue;
        const Point p = g.node(k);
        rmax = std::max(rmax, std::abs(std::complex<double>(p.x, p.y) - c));
    }
    std::vector<std::size_t> ring;
    double rmin = 1e300;
    for (int i = 0; i < g.nx; ++i) {
        ring.push_back(g.index(i, 0));
        ring.push_back(g.index(i, g.ny - 1));
    }
    for (int j = 1; j < g.ny - 1; ++j) {
        ring.push_back(g.index(0, j));
        ring.push_back(g.index(g.nx - 1, j));
    }
    for (std::size_t k : ring) {
        const Point p = g.node(k);
        rmin = std::min(rmin, std::abs(std::complex<double>(p.x, p.y) - c));
    }
    const double ratio = rmax / rmin;
    if (!(ratio < 1.0)) throw Error(ErrorCode::out_of_bounds, "density support reaches the box edge");
    const int order = ratio < 1e-3 ? 4 : std::clamp(static_cast<int>(std::ceil(std::log(1e-15) / std::log(ratio))), 4, 400);

    std::vector<std::complex<double>> moment(static_cast<std::size_t>(order) + 1, {0.0, 0.0});
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double m = weights[k] * h2;
        if (m == 0.0) continue;
        const Point p = g.node(k);
        const std::complex<double> a = std::complex<double>(p.x, p.y) - c;
        std::complex<double> pw = m;
        for (int n = 0; n <= order; ++n) {
            moment[static_cast<std::size_t>(n)] += pw;
            pw *= a;
        }
    }
    for (std::size_t k : ring) {
        const Point p = g.node(k);
        const std::complex<double> b = std::complex<double>(p.x, p.y) - c;
        const std::complex<double> inv = 1.0 / b;
        std::complex<double> pw = inv;
        double v = mass * std::log(std::abs(b));
        for (int n = 1; n <= order; ++n) {
            v -= (moment[static_cast<std::size_t>(n)] * pw).real() / n;
            pw *= inv;
        }
        out[k] = v / two_pi;
    }
}

PotentialField build_potential(const Measure& mu_in, const std::optional<ScalarField>& lambda_in, const GridSpec& box,
                               const SolverOptions& options, bool check_margin) {
    PotentialField p;
    p.kind = lambda_in ? KernelKind::elliptic : KernelKind::newtonian;
    p.source = transfer(mu_in, box);
    if (check_margin) require_margin(p.source, box);
    if (lambda_in) {
        p.lambda = lambda_in->spec() == box ? *lambda_in : transfer(*lambda_in, box);
        for (double v : p.lambda->values()) {
            if (!(v >= OperatorDesc::lambda_floor)) throw Error(ErrorCode::invalid_argument, "lambda below floor on box");
        }
    }
    const Measure& mu = p.source;
    const double h = box.h;
    auto lambda_node = [&](std::size_t k) { return p.lambda ? (*p.lambda)[k] : 1.0; };
    auto lambda_point = [&](Point z) { return p.lambda ? p.lambda->bicubic(z) : 1.0; };
    for (const auto& a : mu.atoms) {
        if (!box.contains(a.position, 2 * h)) throw Error(ErrorCode::out_of_bounds, "atom outside the box");
        p.atom_lambda.push_back(lambda_point(a.position));
    }

    // Smooth part: L S = density - sum m grad(lambda).grad(E_w), S = multipole on the ring.
    ScalarField rhs(box);
    ScalarField weights(box);
    bool any = false;
    for (std::size_t k = 0; k < box.size(); ++k) {
        rhs[k] = mu.density[k];
        weights[k] = mu.density[k] / lambda_node(k);
        any = any || mu.density[k] != 0.0;
    }
    if (p.lambda) {
        const ScalarField& lam = *p.lambda;
        for (int j = 1; j < box.ny - 1; ++j) {
            for (int i = 1; i < box.nx - 1; ++i) {
                const std::size_t k = box.index(i, j);
                const Point gl{(lam.at(i + 1, j) - lam.at(i - 1, j)) / (2 * h),
                               (lam.at(i, j + 1) - lam.at(i, j - 1)) / (2 * h)};
                if (gl.x == 0.0 && gl.y == 0.0) continue;
                const Point z = box.node(i, j);
                for (std::size_t a = 0; a < mu.atoms.size(); ++a) {
                    const Atom& at = mu.atoms[a];
                    const Point ge = distance(z, at.position) < near_atom_cells * h
                                         ? log_kernel_gradient_cell_average(z, h, at.position)
                                         : (z - at.position) / (two_pi * dot(z - at.position, z - at.position));
                    rhs[k] -= at.mass * dot(gl, ge) / p.atom_lambda[a];
                    any = true;
                }
            }
        }
    }
    p.smooth = ScalarField(box);
    if (any) {
        ScalarField ring(box);
        multipole_ring(weights, ring);
        const OperatorDesc op = p.lambda ? OperatorDesc::beltrami(*p.lambda) : OperatorDesc::laplace();
        const EllipticSystem sys = EllipticSystem::box(op, box);
        p.smooth = sys.solve(rhs, ring.values(), nullptr, options);
        for (int i = 0; i < box.nx; ++i) {
            p.smooth.at(i, 0) = ring.at(i, 0);
            p.smooth.at(i, box.ny - 1) = ring.at(i, box.ny - 1);
        }
        for (int j = 0; j < box.ny; ++j) {
            p.smooth.at(0, j) = ring.at(0, j);
            p.smooth.at(box.nx - 1, j) = ring.at(box.nx - 1, j);
        }
    }
    p.field = p.smooth;
    for (std::size_t k = 0; k < box.size(); ++k) {
        const Point z = box.node(k);
        for (std::size_t a = 0; a < mu.atoms.size(); ++a) {
            const Atom& at = mu.atoms[a];
            const double e = distance(z, at.position) < near_atom_cells * h ? log_kernel_cell_average(z, h, at.position)
                                                                             : log_kernel(z, at.position);
            p.field[k] += at.mass * e / p.atom_lambda[a];
        }
    }
    return p;
}

double field_scale(const ScalarField& f) { return std::max(f.max_abs(), 1e-12); }

}  // namespace

double PotentialField::value_at(Point z) const {
    double v = smooth.bicubic(z);
    for (std::size_t a = 0; a < source.atoms.size(); ++a) {
        v += source.atoms[a].mass * log_kernel(z, source.atoms[a].position) / atom_lambda[a];
    }
    return v;
}

GridSpec balayage_box(const Measure& mu, double factor, int min_nodes) {
    if (mu.density.size() == 0) throw Error(ErrorCode::invalid_argument, "measure needs a density grid to fix the lattice");
    if (!(factor >= 2.0)) throw Error(ErrorCode::invalid_argument, "inflation factor must be at least 2");
    const GridSpec& g = mu.density.spec();
    const Support s = support_of(mu);
    if (s.empty) throw Error(ErrorCode::invalid_argument, "empty measure");
    const Point c = 0.5 * (s.lo + s.hi);
    double half = 0.5 * std::max(s.hi.x - s.lo.x, s.hi.y - s.lo.y);
    half = std::max({half, std::sqrt(mu.total_mass() / std::numbers::pi), 2 * g.h});
    const double reach = factor * half;
    const int i0 = static_cast<int>(std::floor((c.x - reach - g.origin.x) / g.h));
    const int j0 = static_cast<int>(std::floor((c.y - reach - g.origin.y) / g.h));
    const int i1 = static_cast<int>(std::ceil((c.x + reach - g.origin.x) / g.h));
    const int j1 = static_cast<int>(std::ceil((c.y + reach - g.origin.y) / g.h));
    int n = std::max({i1 - i0 + 1, j1 - j0 + 1, min_nodes});
    return GridSpec(g.node(i0, j0), g.h, n, n);
}

Measure transfer(const Measure& mu, const GridSpec& box) {
    Measure out;
    out.atoms = mu.atoms;
    out.density = ScalarField(box);
    if (mu.density.size() == 0) return out;
    if (mu.density.spec() == box) {
        out.density = mu.density;
        return out;
    }
    const GridSpec& g = mu.density.spec();
    const Offset o = lattice_offset(g, box);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (mu.density[k] == 0.0) continue;
        const int i = g.i_of(k) - o.di, j = g.j_of(k) - o.dj;
        if (i < 0 || j < 0 || i >= box.nx || j >= box.ny) {
            throw Error(ErrorCode::out_of_bounds, "measure density extends past the target box");
        }
        out.density.at(i, j) = mu.density[k];
    }
    return out;
}

ScalarField transfer(const ScalarField& f, const GridSpec& box) {
    const GridSpec& g = f.spec();
    const Offset o = lattice_offset(g, box);
    ScalarField out(box);
    for (int j = 0; j < box.ny; ++j) {
        for (int i = 0; i < box.nx; ++i) {
            const int si = std::clamp(i + o.di, 0, g.nx - 1);
            const int sj = std::clamp(j + o.dj, 0, g.ny - 1);
            out.at(i, j) = f.at(si, sj);
        }
    }
    return out;
}

PotentialField newtonian_potential(const Measure& mu, const GridSpec& box, const SolverOptions& options) {
    return build_potential(mu, std::nullopt, box, options, true);
}

PotentialField elliptic_potential(const Measure& mu, const ScalarField& lambda, const GridSpec& box,
                                  const SolverOptions& options) {
    return build_potential(mu, lambda, box, options, true);
}

double potential_residual(const PotentialField& p, double clearance) {
    const GridSpec& box = p.smooth.spec();
    const double h = box.h;
    const OperatorDesc op = p.lambda ? OperatorDesc::beltrami(*p.lambda) : OperatorDesc::laplace();
    const EllipticSystem sys = EllipticSystem::box(op, box);
    const ScalarField lap = sys.apply(p.smooth, p.smooth.values());
    double worst = 0.0;
    for (int j = 1; j < box.ny - 1; ++j) {
        for (int i = 1; i < box.nx - 1; ++i) {
            const std::size_t k = box.index(i, j);
            const Point z = box.node(k);
            if (near_any_atom(p.source, z, clearance * h)) continue;
            double v = lap[k] - p.source.density[k];
            if (p.lambda) {
                const ScalarField& lam = *p.lambda;
                const Point gl{(lam.at(i + 1, j) - lam.at(i - 1, j)) / (2 * h),
                               (lam.at(i, j + 1) - lam.at(i, j - 1)) / (2 * h)};
                for (std::size_t a = 0; a < p.source.atoms.size(); ++a) {
                    const Atom& at = p.source.atoms[a];
                    const Point ge = (z - at.position) / (two_pi * dot(z - at.position, z - at.position));
                    v += at.mass * dot(gl, ge) / p.atom_lambda[a];
                }
            }
            worst = std::max(worst, std::abs(v));
        }
    }
    return worst;
}

double BalayageResult::mass_error() const {
    return input_mass > 0.0 ? std::abs(result_mass - input_mass) / input_mass : std::abs(result_mass);
}

double BalayageResult::complementarity_residual() const {
    const GridSpec& box = V.spec();
    const double scale = field_scale(potential.field);
    double worst = 0.0;
    for (int j = 1; j < box.ny - 1; ++j) {
        for (int i = 1; i < box.nx - 1; ++i) {
            const std::size_t k = box.index(i, j);
            const double gap = V[k] - potential.field[k];
            worst = std::max(worst, std::max(0.0, -gap) / scale);
            worst = std::max(worst, std::max(0.0, result_density[k] - 1.0));
            worst = std::max(worst, std::min(std::abs(result_density[k] - 1.0), std::abs(gap) / scale));
        }
    }
    return worst;
}

double BalayageResult::swept_area() const {
    const double h = V.spec().h;
    double a = 0.0;
    for (std::size_t k = 0; k < V.size(); ++k) {
        if (saturated[k]) a += h * h;
    }
    return a;
}

BalayageResult partial_balayage(const Measure& mu, const std::optional<ScalarField>& lambda, const GridSpec& box,
                                const SolverOptions& options) {
    BalayageResult r;
    r.potential = build_potential(mu, lambda, box, options, true);
    r.input_mass = r.potential.source.total_mass();
    if (!std::isfinite(r.input_mass) || r.input_mass <= 0.0) {
        throw Error(ErrorCode::invalid_argument, "balayage needs a finite positive measure");
    }
    const OperatorDesc op = r.potential.lambda ? OperatorDesc::beltrami(*r.potential.lambda) : OperatorDesc::laplace();
    const EllipticSystem sys = EllipticSystem::box(op, box);
    const ScalarField& obstacle = r.potential.field;
    const double scale = field_scale(obstacle);
    SolverReport report;
    r.V = sys.solve_obstacle(ScalarField(box, 1.0), obstacle.values(), obstacle, 1e-11 * scale,
                             std::max(options.max_sweeps, 200000), &report, &r.trace);
    for (std::size_t k = 0; k < box.size(); ++k) {
        const int i = box.i_of(k), j = box.j_of(k);
        if (i == 0 || j == 0 || i == box.nx - 1 || j == box.ny - 1) r.V[k] = obstacle[k];
    }
    r.iterations = report.iterations;
    r.residual = report.residual;
    r.result_density = sys.apply(r.V, obstacle.values());
    r.saturated.assign(box.size(), 0);
    auto in_contact = [&](std::size_t k) { return r.V[k] == obstacle[k]; };
    const double h2 = box.h * box.h;
    for (std::size_t k = 0; k < box.size(); ++k) {
        const int i = box.i_of(k), j = box.j_of(k);
        if (i == 0 || j == 0 || i == box.nx - 1 || j == box.ny - 1) {
            r.result_density[k] = r.potential.source.density[k];
        } else if (in_contact(k) && in_contact(k - 1) && in_contact(k + 1) && in_contact(k - box.nx) &&
                   in_contact(k + box.nx)) {
            // Away from the free boundary the sweep leaves mu untouched.
            r.result_density[k] = r.potential.source.density[k];
        }
        r.saturated[k] = std::abs(r.result_density[k] - 1.0) <= 1e-6 ? 1 : 0;
        r.result_mass += r.result_density[k] * h2;
    }
    if (r.mass_error() > 5e-3) {
        throw Error(ErrorCode::mass_conservation,
                    "balayage lost " + std::to_string(100 * r.mass_error()) + "% of its mass; enlarge the box");
    }
    return r;
}

double quadrature_domain_check(const Measure& mu, const BalayageResult& result) {
    const GridSpec& box = result.V.spec();
    Measure swept;
    swept.density = result.result_density;
    const PotentialField after = build_potential(swept, result.potential.lambda, box, {}, false);
    const PotentialField before = build_potential(mu, result.potential.lambda, box, {}, false);
    // Mask: saturated set grown by three cells.
    std::vector<std::uint8_t> near(box.size(), 0);
    for (std::size_t k = 0; k < box.size(); ++k) {
        if (!result.saturated[k]) continue;
        const int i = box.i_of(k), j = box.j_of(k);
        for (int dj = -3; dj <= 3; ++dj) {
            for (int di = -3; di <= 3; ++di) {
                const int ii = i + di, jj = j + dj;
                if (ii >= 0 && jj >= 0 && ii < box.nx && jj < box.ny) near[box.index(ii, jj)] = 1;
            }
        }
    }
    double gap = 0.0;
    for (std::size_t k = 0; k < box.size(); ++k) {
        if (near[k] || near_any_atom(before.source, box.node(k), near_atom_cells * box.h)) continue;
        gap = std::max(gap, std::abs(after.field[k] - before.field[k]));
    }
    return gap;
}

std::vector<double> swept_domain_implicit(const BalayageResult& result) {
    const GridSpec& box = result.V.spec();
    const double h = box.h;
    const double scale = field_scale(result.potential.field);
    const std::size_t n = box.size();
    std::vector<double> s(n, 0.0);
    std::vector<std::uint8_t> in(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const double d = result.V[k] - result.potential.field[k];
        if (d <= 1e-13 * scale) continue;
        in[k] = 1;
        const double lam = result.potential.lambda ? (*result.potential.lambda)[k] : 1.0;
        const double deficit = std::max(1.0 - result.potential.source.density[k], 0.25);
        s[k] = std::sqrt(2.0 * lam * d / deficit);
    }
    static constexpr int di[4] = {1, -1, 0, 0};
    static constexpr int dj[4] = {0, 0, 1, -1};
    // s is close to linear across the free boundary, so the first two rings of
    // contact nodes get values extrapolated along grid lines from the inside.
    std::vector<double> f(n, 0.0);
    std::vector<std::uint8_t> known(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        if (in[k]) {
            f[k] = -s[k];
            known[k] = 1;
        }
    }
    for (int layer = 1; layer <= 2; ++layer) {
        std::vector<double> next = f;
        std::vector<std::uint8_t> got = known;
        for (std::size_t k = 0; k < n; ++k) {
            if (known[k]) continue;
            const int i = box.i_of(k), j = box.j_of(k);
            double sum = 0.0;
            int count = 0;
            for (int dir = 0; dir < 4; ++dir) {
                const int ai = i - di[dir], aj = j - dj[dir];
                const int bi = ai - di[dir], bj = aj - dj[dir];
                if (bi < 0 || bj < 0 || bi >= box.nx || bj >= box.ny || ai >= box.nx || aj >= box.ny) continue;
                const std::size_t a = box.index(ai, aj), b = box.index(bi, bj);
                if (!known[a]) continue;
                double est = f[a] + h;
                if (known[b]) {
                    const double slope = f[a] - f[b];
                    if (slope > 0.2 * h && slope < 1.5 * h) est = f[a] + slope;
                }
                sum += est;
                ++count;
            }
            if (count > 0) {
                next[k] = sum / count;
                got[k] = 1;
            }
        }
        f.swap(next);
        known.swap(got);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!known[k]) f[k] = 3.0 * h;
    }
    return f;
}

}  // namespace egrowth
