#include "egrowth/green.hpp"

#include <algorithm>
#include <cmath>

namespace egrowth {

namespace {

// Antiderivative in x and y of ln(x^2 + y^2).
double log_antiderivative(double x, double y) {
    double v = -3.0 * x * y;
    const double r2 = x * x + y * y;
    if (r2 > 0.0) v += x * y * std::log(r2);
    if (x != 0.0) v += x * x * std::atan(y / x);
    if (y != 0.0) v += y * y * std::atan(x / y);
    return v;
}

// Antiderivative in y of ln sqrt(a^2 + y^2).
double half_log_antiderivative(double a, double y) {
    double v = -y;
    const double r2 = a * a + y * y;
    if (r2 > 0.0) v += 0.5 * y * std::log(r2);
    if (a != 0.0) v += a * std::atan(y / a);
    return v;
}

// Samples used by the one-sided normal derivative, in cells from the boundary.
constexpr double sample_depth[3] = {3.0, 4.0, 5.0};
// Cubic Lagrange weights for d/ds at s = 0 through s = 0, -3, -4, -5.
constexpr double w0 = 47.0 / 60.0, w3 = -10.0 / 3.0, w4 = 15.0 / 4.0, w5 = -6.0 / 5.0;

// Cell-averaged log kernel is used for nodes closer than this to w (cells).
constexpr double near_cells = 2.5;

void require_clearance(const GridDomain& domain, Point w) {
    const GridSpec& s = domain.spec();
    if (!s.contains(w, 2.0 * s.h)) {
        throw Error(ErrorCode::singularity_too_close, "singularity lies outside the grid");
    }
    const std::size_t k = s.index(static_cast<int>(std::lround((w.x - s.origin.x) / s.h)),
                                  static_cast<int>(std::lround((w.y - s.origin.y) / s.h)));
    if (!domain.inside(k) || domain.distance_to_boundary(w) < singularity_clearance_cells * s.h) {
        throw Error(ErrorCode::singularity_too_close,
                    "singularity must be inside the domain with a 3-cell clearance from the boundary");
    }
}

Point central_difference(const ScalarField& f, std::size_t k) {
    const GridSpec& s = f.spec();
    const int i = s.i_of(k), j = s.j_of(k);
    const int ip = std::min(i + 1, s.nx - 1), im = std::max(i - 1, 0);
    const int jp = std::min(j + 1, s.ny - 1), jm = std::max(j - 1, 0);
    return {(f.at(ip, j) - f.at(im, j)) / ((ip - im) * s.h), (f.at(i, jp) - f.at(i, jm)) / ((jp - jm) * s.h)};
}

double interpolated_boundary_value(const GridDomain& domain, const BoundaryProfile& f, const BandEntry& e) {
    return domain.interpolate_profile(f, e);
}

}  // namespace

double log_kernel(Point z, Point w) { return std::log(distance(z, w)) / two_pi; }

double log_kernel_cell_average(Point c, double h, Point w) {
    const double x0 = c.x - 0.5 * h - w.x, x1 = c.x + 0.5 * h - w.x;
    const double y0 = c.y - 0.5 * h - w.y, y1 = c.y + 0.5 * h - w.y;
    const double integral = log_antiderivative(x1, y1) - log_antiderivative(x0, y1) -
                            log_antiderivative(x1, y0) + log_antiderivative(x0, y0);
    // integral of ln(r^2) = 2 integral of ln r
    return integral / (2.0 * h * h * two_pi);
}

Point log_kernel_gradient_cell_average(Point c, double h, Point w) {
    const double x0 = c.x - 0.5 * h - w.x, x1 = c.x + 0.5 * h - w.x;
    const double y0 = c.y - 0.5 * h - w.y, y1 = c.y + 0.5 * h - w.y;
    // d/dx ln r integrated over the square is a difference of line integrals of ln r.
    const double gx = (half_log_antiderivative(x1, y1) - half_log_antiderivative(x1, y0)) -
                      (half_log_antiderivative(x0, y1) - half_log_antiderivative(x0, y0));
    const double gy = (half_log_antiderivative(y1, x1) - half_log_antiderivative(y1, x0)) -
                      (half_log_antiderivative(y0, x1) - half_log_antiderivative(y0, x0));
    return Point{gx, gy} / (h * h * two_pi);
}

// ---- GreenSolution ---------------------------------------------------------------

double GreenSolution::singular(Point z) const { return Q * log_kernel(z, w) / lambda_w; }

Point GreenSolution::singular_gradient(Point z) const {
    const Point d = z - w;
    return (Q / (two_pi * lambda_w * dot(d, d))) * d;
}

double GreenSolution::value_at(Point z) const { return singular(z) + regular.bicubic(z); }

// ---- extension and normal derivatives --------------------------------------------------

void extend_across_boundary(ScalarField& f, const GridDomain& domain,
                            const std::function<double(const BandEntry&)>& boundary_value, double cells) {
    const GridSpec& s = domain.spec();
    const double h = s.h;
    const auto nodes = domain.boundary();
    for (const BandEntry& e : domain.band()) {
        if (e.distance <= 0.0 || e.distance > cells * h) continue;
        Point n;
        if (e.distance > 1e-3 * h) {
            n = (s.node(e.node) - e.closest) / e.distance;
        } else {
            n = (1.0 - e.t) * nodes[e.a].normal + e.t * nodes[e.b].normal;
            n = n / norm(n);
        }
        const double fb = boundary_value(e);
        const double f2 = f.bilinear(e.closest - 2.0 * h * n);
        const double f3 = f.bilinear(e.closest - 3.0 * h * n);
        const double d = e.distance / h;
        f[e.node] = fb * (d + 2.0) * (d + 3.0) / 6.0 - f2 * d * (d + 3.0) / 2.0 + f3 * d * (d + 2.0) / 3.0;
    }
}

BoundaryProfile normal_derivative(const ScalarField& f, const GridDomain& domain, const BoundaryProfile& boundary_values) {
    if (!(f.spec() == domain.spec())) throw Error(ErrorCode::spec_mismatch, "field lives on a different grid");
    const auto nodes = domain.boundary();
    if (boundary_values.size() != nodes.size()) throw Error(ErrorCode::spec_mismatch, "profile not aligned with boundary");
    const GridSpec& s = domain.spec();
    const double h = s.h;
    BoundaryProfile out(std::vector<double>(nodes.size()));
    for (std::size_t b = 0; b < nodes.size(); ++b) {
        const Point p = nodes[b].position;
        const Point n = nodes[b].normal;
        double fk[3];
        for (int q = 0; q < 3; ++q) {
            const Point x = p - sample_depth[q] * h * n;
            if (!s.contains(x, 2.0 * h)) throw Error(ErrorCode::out_of_bounds, "normal stencil leaves the grid");
            fk[q] = f.bicubic(x);
        }
        out[b] = (w0 * boundary_values[b] + w3 * fk[0] + w4 * fk[1] + w5 * fk[2]) / h;
    }
    return out;
}

BoundaryProfile normal_derivative(const GreenSolution& g) {
    const auto nodes = g.domain.boundary();
    const BoundaryProfile hb(g.domain, [&](const BoundaryNode& b) { return -g.singular(b.position); });
    BoundaryProfile out = normal_derivative(g.regular, g.domain, hb);
    for (std::size_t b = 0; b < nodes.size(); ++b) {
        out[b] += dot(g.singular_gradient(nodes[b].position), nodes[b].normal);
    }
    return out;
}

// ---- Green functions ---------------------------------------------------------------------

namespace {

using RegularSolve = std::function<ScalarField(const ScalarField&, const BoundaryProfile&, SolverReport&)>;

GreenSolution green_with(const OperatorDesc& op, const GridDomain& domain, Point w, double Q, const RegularSolve& solve) {
    op.validate(domain);
    require_clearance(domain, w);
    const GridSpec& s = domain.spec();
    const double h = s.h;

    GreenSolution g{op, domain, w, Q, op.lambda_at(w), ScalarField(s), ScalarField(s), {}};
    const double lw = g.lambda_w;

    // E on nodes, cell-averaged next to the singularity.
    auto kernel_node = [&](std::size_t k) {
        const Point z = s.node(k);
        if (distance(z, w) < near_cells * h) return log_kernel_cell_average(z, h, w) / lw;
        return log_kernel(z, w) / lw;
    };

    ScalarField rhs(s);
    if (op.kind() == OperatorKind::schrodinger) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (domain.inside(k)) rhs[k] = op.potential_node(k) * Q * kernel_node(k);
        }
    } else if (op.kind() == OperatorKind::beltrami) {
        const ScalarField& lambda = op.coefficient();
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (!domain.inside(k)) continue;
            const Point z = s.node(k);
            const Point grad_e = distance(z, w) < near_cells * h
                                     ? log_kernel_gradient_cell_average(z, h, w) / lw
                                     : (1.0 / (two_pi * lw * dot(z - w, z - w))) * (z - w);
            rhs[k] = -Q * dot(central_difference(lambda, k), grad_e);
        }
    }
    const BoundaryProfile bvals(domain, [&](const BoundaryNode& b) { return -g.singular(b.position); });
    g.regular = solve(rhs, bvals, g.report);
    extend_across_boundary(g.regular, domain, [&](const BandEntry& e) { return -g.singular(e.closest); });

    for (std::size_t k = 0; k < s.size(); ++k) {
        if (domain.inside(k)) g.total[k] = Q * kernel_node(k) + g.regular[k];
    }
    for (const BandEntry& e : domain.band()) {
        if (e.distance > 0.0 && e.distance <= 3.0 * h) g.total[e.node] = Q * kernel_node(e.node) + g.regular[e.node];
    }
    return g;
}

}  // namespace

GreenSolution green(const OperatorDesc& op, const GridDomain& domain, Point w, double Q, const SolverOptions& options) {
    const EllipticSystem system(op, domain);
    return green_with(op, domain, w, Q, [&](const ScalarField& rhs, const BoundaryProfile& b, SolverReport& report) {
        return system.solve(rhs, b.values(), nullptr, options, &report);
    });
}

GreenSolution green(const DirectSolver& solver, const OperatorDesc& op, const GridDomain& domain, Point w, double Q) {
    if (!(solver.system().spec() == domain.spec()) || solver.system().boundary_slots() != domain.boundary().size()) {
        throw Error(ErrorCode::spec_mismatch, "factorization belongs to a different domain");
    }
    return green_with(op, domain, w, Q, [&](const ScalarField& rhs, const BoundaryProfile& b, SolverReport&) {
        return solver.solve(rhs, b.values());
    });
}

// ---- Dirichlet problems ------------------------------------------------------------------------

ScalarField solve_dirichlet(const OperatorDesc& op, const GridDomain& domain, const ScalarField& rhs,
                            const BoundaryProfile& f, const SolverOptions& options, SolverReport* report) {
    if (f.size() != domain.boundary().size()) throw Error(ErrorCode::spec_mismatch, "profile not aligned with boundary");
    const EllipticSystem system(op, domain);
    ScalarField u = system.solve(rhs, f.values(), nullptr, options, report);
    extend_across_boundary(u, domain, [&](const BandEntry& e) { return interpolated_boundary_value(domain, f, e); });
    return u;
}

ScalarField dirichlet_solve(const OperatorDesc& op, const GridDomain& domain, const BoundaryProfile& f,
                            const SolverOptions& options, SolverReport* report) {
    return solve_dirichlet(op, domain, ScalarField(domain.spec()), f, options, report);
}

ScalarField dirichlet_solve(const OperatorDesc& op, const GridDomain& domain, const std::function<double(Point)>& f,
                            const SolverOptions& options, SolverReport* report) {
    const BoundaryProfile profile(domain, [&](const BoundaryNode& b) { return f(b.position); });
    const EllipticSystem system(op, domain);
    ScalarField u = system.solve(ScalarField(domain.spec()), profile.values(), nullptr, options, report);
    extend_across_boundary(u, domain, [&](const BandEntry& e) { return f(e.closest); });
    return u;
}

ScalarField apply_T(const GridDomain& domain, const ScalarField& phi, const SolverOptions& options) {
    const BoundaryProfile zero(std::vector<double>(domain.boundary().size(), 0.0));
    return solve_dirichlet(OperatorDesc::laplace(), domain, phi, zero, options);
}

// ---- Poisson kernel ----------------------------------------------------------------------------

namespace {

// P = K + H with K the half-plane kernel at zeta; H solves (Laplacian - u) H = u K, H = -K on the boundary.
ScalarField poisson_kernel_schrodinger(const OperatorDesc& op, const GridDomain& domain, std::size_t zeta,
                                       const SolverOptions& options) {
    const GridSpec& s = domain.spec();
    const auto nodes = domain.boundary();
    const Point z0 = nodes[zeta].position;
    const Point n0 = nodes[zeta].normal;
    auto dipole = [&](Point z) {
        const Point d = z0 - z;
        return dot(n0, d) / (pi * dot(d, d));
    };
    BoundaryProfile kb(std::vector<double>(nodes.size()));
    for (std::size_t b = 0; b < nodes.size(); ++b) {
        if (b != zeta && distance(nodes[b].position, z0) > 1e-9 * s.h) kb[b] = -dipole(nodes[b].position);
    }
    // At zeta itself K has a finite limit; use the neighbours' mean.
    std::size_t prev = zeta, next = zeta;
    for (const auto& [a, b] : domain.segments()) {
        if (b == zeta) prev = a;
        if (a == zeta) next = b;
    }
    kb[zeta] = 0.5 * (kb[prev] + kb[next]);

    ScalarField rhs(s);
    if (op.kind() == OperatorKind::schrodinger) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (domain.inside(k)) rhs[k] = op.potential_node(k) * dipole(s.node(k));
        }
    }
    const EllipticSystem system(op, domain);
    ScalarField p = system.solve(rhs, kb.values(), nullptr, options);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (domain.inside(k)) p[k] += dipole(s.node(k));
    }
    return p;
}

}  // namespace

ScalarField poisson_kernel(const OperatorDesc& op, const GridDomain& domain, std::size_t zeta, const SolverOptions& options) {
    op.validate(domain);
    if (zeta >= domain.boundary().size()) throw Error(ErrorCode::invalid_argument, "boundary node index out of range");
    if (op.kind() != OperatorKind::beltrami) return poisson_kernel_schrodinger(op, domain, zeta, options);

    // P_lambda(zeta, z) = P_u(zeta, z) / sqrt(lambda(z) lambda(zeta)) with u = lambda^{-1/2} Lap(lambda^{1/2}).
    const ScalarField& lambda = op.coefficient();
    const OperatorDesc schr = OperatorDesc::schrodinger(beltrami_potential(lambda));
    ScalarField p = poisson_kernel_schrodinger(schr, domain, zeta, options);
    const double lz = op.lambda_at(domain.boundary()[zeta].position);
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (domain.inside(k)) p[k] /= std::sqrt(lambda[k] * lz);
    }
    return p;
}

double integrate_against_poisson_kernel(const OperatorDesc& op, const GridDomain& domain, std::size_t zeta,
                                        const ScalarField& kernel, const ScalarField& f) {
    const GridSpec& s = domain.spec();
    if (!(kernel.spec() == s) || !(f.spec() == s)) throw Error(ErrorCode::spec_mismatch, "fields live on a different grid");
    const auto nodes = domain.boundary();
    if (zeta >= nodes.size()) throw Error(ErrorCode::invalid_argument, "boundary node index out of range");
    const Point z0 = nodes[zeta].position;
    const Point n0 = nodes[zeta].normal;
    // Leading singular part c K of the kernel.
    const double c = op.kind() == OperatorKind::beltrami ? 1.0 / op.lambda_at(z0) : 1.0;
    auto dipole = [&](Point z) {
        const Point d = z0 - z;
        const double r2 = dot(d, d);
        return r2 > 0.0 ? dot(n0, d) / (pi * r2) : 0.0;
    };
    const double f0 = f.bicubic(z0);
    ScalarField smooth(s);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (domain.weight(k) == 0.0) continue;
        const double kz = dipole(s.node(k));
        const double p = domain.inside(k) ? kernel[k] : c * kz;
        smooth[k] = f[k] * (p - c * kz) + c * (f[k] - f0) * kz;
    }
    // K = -div(n0 ln|z - zeta| / pi), so its area integral is a boundary integral of a log.
    double k_area = 0.0;
    for (std::size_t b = 0; b < nodes.size(); ++b) {
        const double ds = nodes[b].ds;
        const double r = distance(nodes[b].position, z0);
        const double log_part = b == zeta || r < 1e-12 ? ds * (std::log(0.5 * ds) - 1.0) : ds * std::log(r);
        k_area -= dot(n0, nodes[b].normal) * log_part / pi;
    }
    return integrate(smooth, domain) + c * f0 * k_area;
}

// ---- beltrami to schrodinger -------------------------------------------------------------------------------

ScalarField beltrami_potential(const ScalarField& lambda, bool* clamped) {
    const GridSpec& s = lambda.spec();
    ScalarField root(s);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (lambda[k] < OperatorDesc::lambda_floor) throw Error(ErrorCode::invalid_argument, "lambda below floor");
        root[k] = std::sqrt(lambda[k]);
    }
    ScalarField u(s);
    bool any_clamped = false;
    const double h2 = s.h * s.h;
    for (int j = 1; j < s.ny - 1; ++j) {
        for (int i = 1; i < s.nx - 1; ++i) {
            const double lap =
                (root.at(i + 1, j) + root.at(i - 1, j) + root.at(i, j + 1) + root.at(i, j - 1) - 4.0 * root.at(i, j)) / h2;
            double v = lap / root.at(i, j);
            if (v < 0.0 && v > -1e-9) {
                v = 0.0;
                any_clamped = true;
            }
            u.at(i, j) = v;
        }
    }
    // Outer ring: copy the adjacent interior value.
    for (int j = 0; j < s.ny; ++j) {
        for (int i = 0; i < s.nx; ++i) {
            if (i > 0 && j > 0 && i < s.nx - 1 && j < s.ny - 1) continue;
            u.at(i, j) = u.at(std::clamp(i, 1, s.nx - 2), std::clamp(j, 1, s.ny - 2));
        }
    }
    if (clamped != nullptr) *clamped = any_clamped;
    return u;
}

ConversionResult convert_beltrami_to_schrodinger(const ScalarField& lambda, const GridDomain& domain, Point w,
                                                 const SolverOptions& options) {
    ConversionResult out;
    out.u = beltrami_potential(lambda, &out.clamped);
    const GreenSolution gb = green(OperatorDesc::beltrami(lambda), domain, w, 1.0, options);
    const GreenSolution gs = green(OperatorDesc::schrodinger(out.u), domain, w, 1.0, options);
    const GridSpec& s = domain.spec();
    const double lw = gb.lambda_w;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!domain.inside(k) || domain.phi(k) > -3.0 * s.h) continue;
        if (distance(s.node(k), w) < 3.0 * s.h) continue;
        const double mapped = gb.total[k] * std::sqrt(lw * lambda[k]);
        out.discrepancy = std::max(out.discrepancy, std::abs(gs.total[k] - mapped));
        out.scale = std::max(out.scale, std::abs(gs.total[k]));
    }
    return out;
}

}  // namespace egrowth
