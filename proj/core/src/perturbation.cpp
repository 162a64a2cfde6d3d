#include "egrowth/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace egrowth {

namespace {

constexpr double near_cells = 2.5;

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> interior_values(const ScalarField& f, const GridDomain& d) {
    std::vector<double> out;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (d.inside(k)) out.push_back(f[k]);
    }
    return out;
}

std::vector<double> to_vector(const BoundaryProfile& p) { return {p.values().begin(), p.values().end()}; }

OperatorDesc operator_for(const std::optional<ScalarField>& lambda) {
    return lambda ? OperatorDesc::beltrami(*lambda) : OperatorDesc::laplace();
}

// grad g at node k: analytic singular part (cell-averaged next to w) plus
// central differences of the smooth remainder.
Point green_gradient(const GreenSolution& g, std::size_t k) {
    const GridSpec& s = g.domain.spec();
    const Point z = s.node(k);
    const Point sing = distance(z, g.w) < near_cells * s.h
                           ? (g.Q / g.lambda_w) * log_kernel_gradient_cell_average(z, s.h, g.w)
                           : g.singular_gradient(z);
    const int i = s.i_of(k), j = s.j_of(k);
    const Point reg{(g.regular.at(i + 1, j) - g.regular.at(i - 1, j)) / (2.0 * s.h),
                    (g.regular.at(i, j + 1) - g.regular.at(i, j - 1)) / (2.0 * s.h)};
    return sing + reg;
}

// Nodes where quadrature may read an integrand: interior plus a thin exterior band.
std::vector<std::size_t> quadrature_nodes(const GridDomain& d) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < d.spec().size(); ++k) {
        if (d.inside(k)) out.push_back(k);
    }
    for (const BandEntry& e : d.band()) {
        if (e.distance > 0.0 && e.distance <= 2.0 * d.spec().h) out.push_back(e.node);
    }
    return out;
}

}  // namespace

// ---- reports --------------------------------------------------------------------

std::string VariationReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["epsilon"] = epsilons;
    j["defects"] = defects;
    j["ratio"] = ratio;
    j["ratio_range"] = {ratio_lo, ratio_hi};
    j["coefficient_norm"] = coefficient_norm;
    j["pass"] = pass();
    return j.dump(2);
}

VariationReport defect_study(std::string name, const std::vector<double>& base, const std::vector<double>& coefficient,
                             const std::function<std::vector<double>(double)>& direct, double eps) {
    if (base.size() != coefficient.size()) throw Error(ErrorCode::spec_mismatch, "base and coefficient sizes differ");
    if (!(eps > 0.0)) throw Error(ErrorCode::invalid_argument, "defect study needs eps > 0");
    VariationReport r;
    r.name = std::move(name);
    r.coefficient_norm = max_abs(coefficient);
    for (double e : {eps, 0.5 * eps}) {
        const std::vector<double> truth = direct(e);
        if (truth.size() != base.size()) throw Error(ErrorCode::spec_mismatch, "direct solve changed shape");
        double d = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i) d = std::max(d, std::abs(truth[i] - (base[i] + e * coefficient[i])));
        r.epsilons.push_back(e);
        r.defects.push_back(d);
    }
    r.ratio = r.defects[1] > 0.0 ? r.defects[0] / r.defects[1] : 0.0;
    return r;
}

// ---- Hadamard -----------------------------------------------------------------------

double hadamard_variation(const GridDomain& domain, Point w, Point z, const BoundaryProfile& p,
                          const std::optional<ScalarField>& lambda) {
    const auto nodes = domain.boundary();
    if (p.size() != nodes.size()) throw Error(ErrorCode::spec_mismatch, "profile not aligned with boundary");
    if (p.max_abs() == 0.0) return 0.0;
    const OperatorDesc op = operator_for(lambda);
    const BoundaryProfile dw = normal_derivative(green(op, domain, w));
    const BoundaryProfile dz = distance(w, z) == 0.0 ? dw : normal_derivative(green(op, domain, z));
    double sum = 0.0;
    for (std::size_t b = 0; b < nodes.size(); ++b) {
        sum += p[b] * op.lambda_at(nodes[b].position) * dz[b] * dw[b] * nodes[b].ds;
    }
    return -sum;
}

VariationReport hadamard_defect(const std::function<GridDomain(double)>& family, Point w, Point z,
                                const std::function<double(const BoundaryNode&)>& p, double eps,
                                const std::optional<ScalarField>& lambda) {
    const GridDomain base = family(0.0);
    const OperatorDesc op = operator_for(lambda);
    const double g0 = green(op, base, w).value_at(z);
    const double f = hadamard_variation(base, w, z, BoundaryProfile(base, p), lambda);
    return defect_study("hadamard", {g0}, {f},
                        [&](double e) { return std::vector<double>{green(op, family(e), w).value_at(z)}; }, eps);
}

ZeroCurvatureReport zero_curvature_check(const GridDomain& domain, Point a, Point b, Point c,
                                         const std::optional<ScalarField>& lambda) {
    const OperatorDesc op = operator_for(lambda);
    const BoundaryProfile da = normal_derivative(green(op, domain, a));
    const BoundaryProfile db = distance(a, b) == 0.0 ? da : normal_derivative(green(op, domain, b));
    const BoundaryProfile dc = distance(a, c) == 0.0   ? da
                               : distance(b, c) == 0.0 ? db
                                                       : normal_derivative(green(op, domain, c));
    const auto nodes = domain.boundary();
    ZeroCurvatureReport r;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double wk = op.lambda_at(nodes[k].position) * nodes[k].ds;
        r.abc -= da[k] * db[k] * dc[k] * wk;
        r.bca -= db[k] * dc[k] * da[k] * wk;
        r.cab -= dc[k] * da[k] * db[k] * wk;
    }
    const double scale = std::max({std::abs(r.abc), std::abs(r.bca), std::abs(r.cab)});
    if (scale > 0.0) {
        r.max_relative_gap =
            std::max({std::abs(r.abc - r.bca), std::abs(r.bca - r.cab), std::abs(r.abc - r.cab)}) / scale;
    }
    return r;
}

// ---- Schrodinger series -------------------------------------------------------------------

SeriesResult schrodinger_green_series(const GridDomain& domain, const ScalarField& u, Point w, double eps, int n_terms,
                                      const SolverOptions& options) {
    if (n_terms < 0 || n_terms > 6) throw Error(ErrorCode::invalid_argument, "series supports 0..6 correction terms");
    OperatorDesc::schrodinger(u).validate(domain);
    const GreenSolution g = green(OperatorDesc::laplace(), domain, w, 1.0, options);
    SeriesResult r;
    r.total = g.total;
    if (eps == 0.0 || n_terms == 0) return r;

    double u_max = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (domain.inside(k)) u_max = std::max(u_max, std::abs(u[k]));
    }
    // T is positivity preserving, so its sup-norm is that of T1.
    const ScalarField t1 = apply_T(domain, ScalarField(domain.spec(), 1.0), options);
    r.guard = std::abs(eps) * u_max * t1.max_abs();
    if (r.guard >= 0.5) {
        throw Error(ErrorCode::series_divergence,
                    "series guard eps*|u|*|T| = " + std::to_string(r.guard) + " exceeds 0.5");
    }
    ScalarField term = g.total;
    double scale = 1.0;
    for (int n = 1; n <= n_terms; ++n) {
        ScalarField rhs = u * term;
        for (std::size_t k = 0; k < rhs.size(); ++k) {
            if (!domain.inside(k)) rhs[k] = 0.0;
        }
        term = apply_T(domain, rhs, options);
        for (std::size_t k = 0; k < term.size(); ++k) {
            if (!domain.inside(k)) term[k] = 0.0;
        }
        scale *= eps;
        r.total.axpy(scale, term);
        r.term_norms.push_back(std::abs(scale) * term.max_abs());
    }
    return r;
}

VariationReport schrodinger_series_defect(const GridDomain& domain, const ScalarField& u, Point w, double eps) {
    const SeriesResult base = schrodinger_green_series(domain, u, w, 0.0, 0);
    // First-order coefficient T(u g_w).
    ScalarField rhs = u * base.total;
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (!domain.inside(k)) rhs[k] = 0.0;
    }
    const ScalarField f = apply_T(domain, rhs);
    return defect_study("schrodinger-series", interior_values(base.total, domain), interior_values(f, domain),
                        [&](double e) {
                            return interior_values(green(OperatorDesc::schrodinger(e * u), domain, w).total, domain);
                        },
                        eps);
}

// ---- Beltrami ------------------------------------------------------------------------------

double beltrami_green_variation(const GridDomain& domain, const ScalarField& p, Point w, Point z, BeltramiFormula formula) {
    const GridSpec& s = domain.spec();
    if (!(p.spec() == s)) throw Error(ErrorCode::spec_mismatch, "p lives on a different grid");
    if (p.max_abs() == 0.0) return 0.0;
    const GreenSolution gw = green(OperatorDesc::laplace(), domain, w);
    const GreenSolution gz = distance(w, z) == 0.0 ? gw : green(OperatorDesc::laplace(), domain, z);
    ScalarField integrand(s);
    if (formula == BeltramiFormula::gradient) {
        for (std::size_t k : quadrature_nodes(domain)) {
            integrand[k] = p[k] * dot(green_gradient(gz, k), green_gradient(gw, k));
        }
        return integrate(integrand, domain);
    }
    const ScalarField lap = discrete_laplacian(p);
    for (std::size_t k : quadrature_nodes(domain)) integrand[k] = gz.total[k] * gw.total[k] * lap[k];
    const double gzw = gw.value_at(z);
    return -gzw * 0.5 * (p.bicubic(z) + p.bicubic(w)) + 0.5 * integrate(integrand, domain);
}

VariationReport beltrami_defect(const GridDomain& domain, const ScalarField& p, Point w, Point z, double eps,
                                BeltramiFormula formula) {
    const double g0 = green(OperatorDesc::laplace(), domain, w).value_at(z);
    const double f = beltrami_green_variation(domain, p, w, z, formula);
    const ScalarField one(domain.spec(), 1.0);
    VariationReport r = defect_study(
        formula == BeltramiFormula::gradient ? "beltrami-gradient" : "beltrami-laplacian", {g0}, {f},
        [&](double e) { return std::vector<double>{green(OperatorDesc::beltrami(one + e * p), domain, w).value_at(z)}; },
        eps);
    return r;
}

// ---- normal derivatives ------------------------------------------------------------------------

BoundaryProfile normal_variation_schrodinger_coefficient(const GridDomain& domain, const ScalarField& u, Point w) {
    OperatorDesc::schrodinger(u).validate(domain);
    const GreenSolution g = green(OperatorDesc::laplace(), domain, w);
    ScalarField rhs = u * g.total;
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (!domain.inside(k)) rhs[k] = 0.0;
    }
    // Integrating against P_zeta is the normal derivative of T(rhs) at zeta.
    const ScalarField psi = apply_T(domain, rhs);
    return normal_derivative(psi, domain, BoundaryProfile(std::vector<double>(domain.boundary().size(), 0.0)));
}

double normal_variation_schrodinger(const GridDomain& domain, const ScalarField& u, Point w, std::size_t zeta, double eps) {
    if (zeta >= domain.boundary().size()) throw Error(ErrorCode::invalid_argument, "boundary node index out of range");
    const BoundaryProfile base = normal_derivative(green(OperatorDesc::laplace(), domain, w));
    if (eps == 0.0) return base[zeta];
    return base[zeta] + eps * normal_variation_schrodinger_coefficient(domain, u, w)[zeta];
}

BoundaryProfile normal_variation_beltrami_coefficient(const GridDomain& domain, const ScalarField& u, Point w) {
    const GreenSolution g = green(OperatorDesc::laplace(), domain, w);
    const BoundaryProfile dn = normal_derivative(g);
    const ScalarField lap = discrete_laplacian(u);
    ScalarField rhs = lap * g.total;
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (!domain.inside(k)) rhs[k] = 0.0;
    }
    const ScalarField psi = apply_T(domain, rhs);
    BoundaryProfile out = normal_derivative(psi, domain, BoundaryProfile(std::vector<double>(dn.size(), 0.0)));
    const double uw = u.bicubic(w);
    const auto nodes = domain.boundary();
    for (std::size_t b = 0; b < nodes.size(); ++b) {
        out[b] = 0.5 * (out[b] - dn[b] * (u.bicubic(nodes[b].position) + uw));
    }
    return out;
}

double normal_variation_beltrami(const GridDomain& domain, const ScalarField& u, Point w, std::size_t zeta, double eps) {
    if (zeta >= domain.boundary().size()) throw Error(ErrorCode::invalid_argument, "boundary node index out of range");
    const BoundaryProfile base = normal_derivative(green(OperatorDesc::laplace(), domain, w));
    if (eps == 0.0) return base[zeta];
    return base[zeta] + eps * normal_variation_beltrami_coefficient(domain, u, w)[zeta];
}

VariationReport normal_schrodinger_defect(const GridDomain& domain, const ScalarField& u, Point w, double eps) {
    const BoundaryProfile base = normal_derivative(green(OperatorDesc::laplace(), domain, w));
    const BoundaryProfile f = normal_variation_schrodinger_coefficient(domain, u, w);
    return defect_study("normal-schrodinger", to_vector(base), to_vector(f),
                        [&](double e) {
                            return to_vector(normal_derivative(green(OperatorDesc::schrodinger(e * u), domain, w)));
                        },
                        eps);
}

VariationReport normal_beltrami_defect(const GridDomain& domain, const ScalarField& u, Point w, double eps) {
    const BoundaryProfile base = normal_derivative(green(OperatorDesc::laplace(), domain, w));
    const BoundaryProfile f = normal_variation_beltrami_coefficient(domain, u, w);
    const ScalarField one(domain.spec(), 1.0);
    return defect_study("normal-beltrami", to_vector(base), to_vector(f),
                        [&](double e) {
                            return to_vector(normal_derivative(green(OperatorDesc::beltrami(one + e * u), domain, w)));
                        },
                        eps);
}

ScalarField discrete_laplacian(const ScalarField& f) {
    const GridSpec& s = f.spec();
    ScalarField out(s);
    const double h2 = s.h * s.h;
    for (int j = 1; j < s.ny - 1; ++j) {
        for (int i = 1; i < s.nx - 1; ++i) {
            out.at(i, j) = (f.at(i + 1, j) + f.at(i - 1, j) + f.at(i, j + 1) + f.at(i, j - 1) - 4.0 * f.at(i, j)) / h2;
        }
    }
    return out;
}

}  // namespace egrowth
