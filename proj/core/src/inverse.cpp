#include "egrowth/inverse.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace egrowth {

namespace {

// Weights (per h) of the outward derivative at 0 from samples at 0, -d1, -d2, -d3.
std::array<double, 4> one_sided_weights(const std::array<double, 3>& depth) {
    const std::array<double, 4> s = {0.0, -depth[0], -depth[1], -depth[2]};
    std::array<double, 4> w{};
    for (std::size_t i = 0; i < 4; ++i) {
        // derivative at 0 of the Lagrange basis polynomial of node i
        double denom = 1.0;
        for (std::size_t j = 0; j < 4; ++j) {
            if (j != i) denom *= s[i] - s[j];
        }
        double num = 0.0;
        for (std::size_t skip = 0; skip < 4; ++skip) {
            if (skip == i) continue;
            double prod = 1.0;
            for (std::size_t j = 0; j < 4; ++j) {
                if (j != i && j != skip) prod *= -s[j];
            }
            num += prod;
        }
        w[i] = num / denom;
    }
    return w;
}

BoundaryProfile zeros(const GridDomain& D) { return BoundaryProfile(std::vector<double>(D.boundary().size(), 0.0)); }

OperatorDesc belt(const ScalarField& lambda) { return OperatorDesc::beltrami(lambda); }

}  // namespace

ForwardOperator::ForwardOperator(const GridDomain& D, Point w)
    : domain_(D),
      solver_(EllipticSystem(OperatorDesc::laplace(), D)),
      green_(green(solver_, OperatorDesc::laplace(), D, w)) {}

BoundaryProfile ForwardOperator::apply(const ScalarField& u) const {
    if (!(u.spec() == domain_.spec())) throw Error(ErrorCode::spec_mismatch, "u lives on a different grid");
    ScalarField rhs(domain_.spec());
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (domain_.inside(k)) rhs[k] = u[k] * green_.total[k];
    }
    const BoundaryProfile zero = zeros(domain_);
    ScalarField psi = solver_.solve(rhs, zero.values());
    extend_across_boundary(psi, domain_, [](const BandEntry&) { return 0.0; });
    return normal_derivative(psi, domain_, zero);
}

BoundaryProfile forward_A(const ScalarField& u, const GridDomain& D, Point w) { return ForwardOperator(D, w).apply(u); }

double boundary_norm(const BoundaryProfile& f, const GridDomain& D) {
    const auto nodes = D.boundary();
    double s = 0.0;
    for (std::size_t b = 0; b < nodes.size(); ++b) s += f[b] * f[b] * nodes[b].ds;
    return std::sqrt(s);
}

PreimageResult least_squares_preimage(const ForwardOperator& A, const BoundaryProfile& target, int degree) {
    if (degree < 0 || degree > 8) throw Error(ErrorCode::invalid_argument, "polynomial degree must be in [0, 8]");
    const GridDomain& D = A.domain();
    const auto nodes = D.boundary();
    if (target.size() != nodes.size()) throw Error(ErrorCode::spec_mismatch, "target not aligned with the boundary");
    const int nb = degree + 1;
    const auto rows = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd M(rows, nb * nb);
    Eigen::VectorXd t(rows);
    std::vector<ScalarField> basis;
    for (int j = 0; j < nb; ++j) {
        for (int i = 0; i < nb; ++i) {
            basis.push_back(ScalarField::sample(D.spec(), [i, j](Point p) { return std::pow(p.x, i) * std::pow(p.y, j); }));
            const BoundaryProfile col = A.apply(basis.back());
            for (Eigen::Index b = 0; b < rows; ++b) {
                M(b, static_cast<Eigen::Index>(basis.size() - 1)) = col[static_cast<std::size_t>(b)] *
                                                                    std::sqrt(nodes[static_cast<std::size_t>(b)].ds);
            }
        }
    }
    for (Eigen::Index b = 0; b < rows; ++b) {
        t(b) = target[static_cast<std::size_t>(b)] * std::sqrt(nodes[static_cast<std::size_t>(b)].ds);
    }
    const Eigen::VectorXd c = M.colPivHouseholderQr().solve(t);
    PreimageResult r;
    r.degree = degree;
    r.u = ScalarField(D.spec());
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        r.coefficients.push_back(c(k));
        r.u.axpy(c(k), basis[static_cast<std::size_t>(k)]);
    }
    r.image = A.apply(r.u);
    BoundaryProfile diff = r.image;
    for (std::size_t b = 0; b < diff.size(); ++b) diff[b] -= target[b];
    r.residual = boundary_norm(diff, D);
    r.target_norm = boundary_norm(target, D);
    return r;
}

BoundaryProfile pumping_response(const ScalarField& lambda, const GridDomain& D, Point p) {
    const OperatorDesc op = belt(lambda);
    BoundaryProfile v = normal_derivative(green(op, D, p));
    const auto nodes = D.boundary();
    for (std::size_t b = 0; b < nodes.size(); ++b) v[b] *= op.lambda_at(nodes[b].position);
    return v;
}

BoundaryProfile dtn_direct(const ScalarField& lambda, const GridDomain& D, const BoundaryProfile& f) {
    const ScalarField u = dirichlet_solve(belt(lambda), D, f);
    return normal_derivative(u, D, f);
}

double power_functional(const ScalarField& lambda, const GridDomain& D, const BoundaryProfile& f) {
    const OperatorDesc op = belt(lambda);
    const BoundaryProfile n = dtn_direct(lambda, D, f);
    const auto nodes = D.boundary();
    double s = 0.0;
    for (std::size_t b = 0; b < nodes.size(); ++b) s += f[b] * op.lambda_at(nodes[b].position) * n[b] * nodes[b].ds;
    return s;
}

ProbeSet ProbeSet::every(const GridDomain& D, std::size_t stride) {
    if (stride == 0) throw Error(ErrorCode::invalid_argument, "stride must be positive");
    ProbeSet p;
    for (std::size_t b = 0; b < D.boundary().size(); b += stride) p.nodes.push_back(b);
    return p;
}

ResponseDtN::ResponseDtN(const ScalarField& lambda, const GridDomain& D, ProbeSet probes)
    : domain_(D), probes_(std::move(probes)) {
    if (!(probes_.depths[0] >= 3.0 && probes_.depths[0] < probes_.depths[1] && probes_.depths[1] < probes_.depths[2])) {
        throw Error(ErrorCode::singularity_too_close, "probe depths must increase from at least three cells");
    }
    const OperatorDesc op = belt(lambda);
    const DirectSolver solver{EllipticSystem(op, D)};
    const auto nodes = D.boundary();
    const double h = D.spec().h;
    std::vector<double> weight(nodes.size());
    for (std::size_t b = 0; b < nodes.size(); ++b) weight[b] = op.lambda_at(nodes[b].position) * nodes[b].ds;
    for (std::size_t q : probes_.nodes) {
        if (q >= nodes.size()) throw Error(ErrorCode::invalid_argument, "probe node out of range");
        for (double depth : probes_.depths) {
            const Point p = nodes[q].position - depth * h * nodes[q].normal;
            if (D.distance_to_boundary(p) < 3.0 * h) {
                throw Error(ErrorCode::singularity_too_close, "probe closer than three cells to the boundary");
            }
            BoundaryProfile v = normal_derivative(green(solver, op, D, p));
            std::vector<double> row(nodes.size());
            for (std::size_t b = 0; b < nodes.size(); ++b) row[b] = v[b] * weight[b];
            responses_.push_back(std::move(row));
        }
    }
}

BoundaryProfile ResponseDtN::apply(const BoundaryProfile& f) const {
    const std::size_t nb = domain_.boundary().size();
    if (f.size() != nb) throw Error(ErrorCode::spec_mismatch, "profile not aligned with the boundary");
    const double h = domain_.spec().h;
    const std::array<double, 4> one_sided = one_sided_weights(probes_.depths);
    BoundaryProfile out(std::vector<double>(nb, std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t q = 0; q < probes_.nodes.size(); ++q) {
        const std::size_t zeta = probes_.nodes[q];
        double d = one_sided[0] * f[zeta];
        for (std::size_t m = 0; m < 3; ++m) {
            // Subtracting f(zeta) keeps the sharply peaked response from dominating the quadrature error.
            const auto& row = responses_[3 * q + m];
            double u = f[zeta];
            for (std::size_t b = 0; b < nb; ++b) u += (f[b] - f[zeta]) * row[b];
            d += one_sided[m + 1] * u;
        }
        out[zeta] = d / h;
    }
    return out;
}

BoundaryProfile dtn_from_response(const ScalarField& lambda, const GridDomain& D, const BoundaryProfile& f,
                                  const ProbeSet& probes) {
    return ResponseDtN(lambda, D, probes).apply(f);
}

std::vector<BoundaryProfile> fourier_modes(const GridDomain& D, int order) {
    if (order < 0) throw Error(ErrorCode::invalid_argument, "mode order must be nonnegative");
    const std::vector<double> theta = D.boundary_angles();
    std::vector<BoundaryProfile> modes;
    modes.emplace_back(std::vector<double>(theta.size(), 1.0));
    for (int k = 1; k <= order; ++k) {
        std::vector<double> c(theta.size()), s(theta.size());
        for (std::size_t b = 0; b < theta.size(); ++b) {
            c[b] = std::cos(k * theta[b]);
            s[b] = std::sin(k * theta[b]);
        }
        modes.emplace_back(std::move(c));
        modes.emplace_back(std::move(s));
    }
    return modes;
}

double DtNMatrix::symmetry_defect() const {
    double scale = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            scale = std::max(scale, std::abs(matrix[i][j]));
            worst = std::max(worst, std::abs(matrix[i][j] - matrix[j][i]));
        }
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

std::string DtNMatrix::to_csv() const {
    std::ostringstream out;
    out.precision(12);
    out << "mode";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out << labels[i];
        for (double v : matrix[i]) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

DtNMatrix dtn_matrix(const ScalarField& lambda, const GridDomain& D, int order) {
    if (order < 0 || order > 6) throw Error(ErrorCode::invalid_argument, "DtN modes are limited to order 6");
    const OperatorDesc op = belt(lambda);
    const DirectSolver solver{EllipticSystem(op, D)};
    const std::vector<BoundaryProfile> modes = fourier_modes(D, order);
    const auto nodes = D.boundary();
    DtNMatrix m;
    m.labels.push_back("1");
    for (int k = 1; k <= order; ++k) {
        m.labels.push_back("cos" + std::to_string(k));
        m.labels.push_back("sin" + std::to_string(k));
    }
    const std::size_t n = modes.size();
    m.matrix.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        ScalarField u = solver.solve(ScalarField(D.spec()), modes[j].values());
        extend_across_boundary(u, D, [&](const BandEntry& e) { return D.interpolate_profile(modes[j], e); });
        const BoundaryProfile dn = normal_derivative(u, D, modes[j]);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t b = 0; b < nodes.size(); ++b) s += modes[i][b] * dn[b] * nodes[b].ds;
            m.matrix[i][j] = s;
        }
    }
    return m;
}

std::string TwoPointReport::to_json() const {
    nlohmann::json j;
    j["gap_w"] = gap_w;
    j["gap_xi"] = gap_xi;
    j["scale_w"] = scale_w;
    j["scale_xi"] = scale_xi;
    return j.dump(2);
}

TwoPointReport two_point_response_experiment(const ScalarField& lambda1, const ScalarField& lambda2, const GridDomain& D,
                                             Point w, Point xi) {
    if (distance(w, xi) < D.spec().h) throw Error(ErrorCode::invalid_argument, "pumping points must be distinct");
    auto gap = [](const BoundaryProfile& a, const BoundaryProfile& b) {
        double g = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) g = std::max(g, std::abs(a[k] - b[k]));
        return g;
    };
    TwoPointReport r;
    const BoundaryProfile w1 = pumping_response(lambda1, D, w), w2 = pumping_response(lambda2, D, w);
    const BoundaryProfile x1 = pumping_response(lambda1, D, xi), x2 = pumping_response(lambda2, D, xi);
    r.gap_w = gap(w1, w2);
    r.gap_xi = gap(x1, x2);
    r.scale_w = w1.max_abs();
    r.scale_xi = x1.max_abs();
    return r;
}

}  // namespace egrowth
