#include "egrowth/dirichlet_perturb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace egrowth {

namespace {

Point central_difference(const ScalarField& f, std::size_t k) {
    const GridSpec& s = f.spec();
    const int i = s.i_of(k), j = s.j_of(k);
    return {(f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * s.h), (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * s.h)};
}

ScalarField restrict_to(const ScalarField& f, const GridDomain& d) {
    ScalarField out(f.spec());
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (d.inside(k)) out[k] = f[k];
    }
    return out;
}

void require_unit_disk(const GridDomain& d) {
    const double h = d.spec().h;
    for (const BoundaryNode& b : d.boundary()) {
        if (std::abs(norm(b.position) - 1.0) > h) {
            throw Error(ErrorCode::invalid_argument, "green_area_moment needs the unit disk");
        }
    }
}

}  // namespace

ScalarField dirichlet_schrodinger_first_order(const GridDomain& domain, const ScalarField& u, const BoundaryProfile& f,
                                              double eps) {
    OperatorDesc::schrodinger(u).validate(domain);
    ScalarField phi0 = dirichlet_solve(OperatorDesc::laplace(), domain, f);
    if (eps == 0.0) return phi0;
    const ScalarField psi = apply_T(domain, restrict_to(u * phi0, domain));
    return phi0.axpy(eps, psi);
}

ScalarField dirichlet_beltrami_first_order(const GridDomain& domain, const ScalarField& u, const BoundaryProfile& f,
                                           double eps) {
    if (!(u.spec() == domain.spec())) throw Error(ErrorCode::spec_mismatch, "u lives on a different grid");
    ScalarField phi0 = dirichlet_solve(OperatorDesc::laplace(), domain, f);
    if (eps == 0.0) return phi0;
    ScalarField rhs(domain.spec());
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (domain.inside(k)) rhs[k] = -dot(central_difference(u, k), central_difference(phi0, k));
    }
    const ScalarField psi = apply_T(domain, rhs);
    return phi0.axpy(eps, psi);
}

GreenAreaMoment green_area_moment(const GridDomain& unit_disk, Point z, int n) {
    if (n < 0 || n > 4) throw Error(ErrorCode::invalid_argument, "green_area_moment supports 0 <= n <= 4");
    require_unit_disk(unit_disk);
    const GreenSolution g = green(OperatorDesc::laplace(), unit_disk, z);
    const ScalarField weight =
        ScalarField::sample(unit_disk.spec(), [n](Point p) { return std::pow(dot(p, p), n); });
    GreenAreaMoment r;
    r.quadrature = integrate(weight * g.total, unit_disk);
    r.closed_form = -(1.0 - std::pow(dot(z, z), n + 1)) / (4.0 * (n + 1) * (n + 1));
    return r;
}

double green_l2_norm(const GreenSolution& g) {
    const GridSpec& s = g.domain.spec();
    const double h = s.h;
    ScalarField sq(s);
    constexpr int sub = 32;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (g.total[k] == 0.0 && !g.domain.inside(k)) continue;
        const Point c = s.node(k);
        if (distance(c, g.w) >= 2.5 * h) {
            sq[k] = g.total[k] * g.total[k];
            continue;
        }
        // Mean of (Q E + h)^2 over the cell with h frozen at the node value.
        const double reg = g.regular[k];
        double acc = 0.0;
        for (int a = 0; a < sub; ++a) {
            for (int b = 0; b < sub; ++b) {
                const Point p{c.x + ((a + 0.5) / sub - 0.5) * h, c.y + ((b + 0.5) / sub - 0.5) * h};
                const double v = g.singular(p) + reg;
                acc += v * v;
            }
        }
        sq[k] = acc / (sub * sub);
    }
    return std::sqrt(integrate(sq, g.domain));
}

LinearizationBound linearization_bound_check(const GridDomain& domain, const ScalarField& u, const BoundaryProfile& f) {
    OperatorDesc::schrodinger(u).validate(domain);
    const GridSpec& s = domain.spec();
    LinearizationBound r;
    std::vector<std::size_t> deep;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (domain.inside(k) && domain.phi(k) <= -4.0 * s.h) deep.push_back(k);
    }
    if (deep.size() < 16) throw Error(ErrorCode::invalid_argument, "domain too small for 16 probes");
    for (int q = 0; q < 16; ++q) r.probes.push_back(s.node(deep[(2 * q + 1) * deep.size() / 32]));

    const ScalarField phi0 = dirichlet_solve(OperatorDesc::laplace(), domain, f);
    const ScalarField psi = apply_T(domain, restrict_to(u * phi0, domain));
    const double u2 = std::sqrt(integrate(u * u, domain));
    double finf = 0.0;
    for (double v : f.values()) finf = std::max(finf, std::abs(v));
    for (const Point& z : r.probes) {
        const double lhs = std::abs(psi.bicubic(z));
        const double rhs = u2 * finf * green_l2_norm(green(OperatorDesc::laplace(), domain, z));
        r.variation.push_back(lhs);
        r.bound.push_back(rhs);
        if (rhs > 0.0) r.worst_ratio = std::max(r.worst_ratio, lhs / rhs);
    }
    return r;
}

bool GoldenRow::pass() const {
    const double err = std::abs(computed - reference);
    return relative ? err <= tolerance * std::abs(reference) : err <= tolerance;
}

std::vector<GoldenRow> dirichlet_goldens(int n) {
    const GridSpec s = GridSpec::square(-2.0, 2.0, n);
    const GridDomain d = make_disk({0, 0}, 1.0, s);
    std::vector<GoldenRow> rows;
    for (int m : {0, 1, 2}) {
        for (double r : {0.0, 0.3, 0.6}) {
            const GreenAreaMoment g = green_area_moment(d, {r, 0.0}, m);
            std::ostringstream in;
            in << "green_area n=" << m << " |z|=" << r;
            rows.push_back({in.str(), g.closed_form, g.quadrature, 0.01, true});
        }
    }
    const double a = 0.1;
    const BoundaryProfile one(d, [](const BoundaryNode&) { return 1.0; });
    const ScalarField helm = dirichlet_schrodinger_first_order(d, ScalarField(s, 1.0), one, a);
    for (Point z : {Point{0, 0}, Point{0.5, 0}, Point{-0.3, 0.6}}) {
        std::ostringstream in;
        in << "helmholtz a=0.1 z=(" << z.x << "," << z.y << ")";
        rows.push_back({in.str(), 1.0 - a / 4.0 * (1.0 - dot(z, z)), helm.bicubic(z), 1e-3, false});
    }
    const auto u = ScalarField::sample(s, [](Point p) { return dot(p, p); });
    const BoundaryProfile f(d, [](const BoundaryNode& b) { return b.position.x * b.position.x - b.position.y * b.position.y; });
    const double eps = 1e-3;
    const ScalarField phi0 = dirichlet_beltrami_first_order(d, u, f, 0.0);
    const ScalarField phi1 = dirichlet_beltrami_first_order(d, u, f, eps);
    for (Point z : {Point{0, 0}, Point{0.5, 0}, Point{0.2, 0.6}}) {
        std::ostringstream in;
        in << "beltrami first variation z=(" << z.x << "," << z.y << ")";
        const double stated = -(1.0 - std::pow(dot(z, z), 2)) / 4.0;
        rows.push_back({in.str(), stated, (phi1.bicubic(z) - phi0.bicubic(z)) / eps, 1e-3, false});
    }
    return rows;
}

}  // namespace egrowth
