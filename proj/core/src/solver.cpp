#include "egrowth/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>

namespace egrowth {

namespace {

constexpr double theta_floor = 1e-6;
// First zero of J0; the Faber-Krahn bound gives the smallest Dirichlet
// eigenvalue a domain of a given area can have.
constexpr double j01 = 2.404825557695773;

constexpr int di[4] = {1, -1, 0, 0};
constexpr int dj[4] = {0, 0, 1, -1};

double face_coefficient(const OperatorDesc& op, std::size_t a, std::size_t b) {
    if (op.kind() != OperatorKind::beltrami) return 1.0;
    const double la = op.lambda_node(a);
    const double lb = op.lambda_node(b);
    return 2.0 * la * lb / (la + lb);
}

}  // namespace

EllipticSystem::EllipticSystem(const OperatorDesc& op, const GridDomain& domain) : spec_(domain.spec()) {
    op.validate(domain);
    const std::size_t n = spec_.size();
    local_.assign(n, -1);
    for (std::size_t k = 0; k < n; ++k) {
        if (domain.inside(k)) {
            local_[k] = static_cast<int>(nodes_.size());
            nodes_.push_back(k);
        }
    }
    const std::size_t m = nodes_.size();
    nbr_.assign(4 * m, -1);
    coef_.assign(4 * m, 0.0);
    bslot_.assign(4 * m, -1);
    diag_.assign(m, 0.0);
    const double h2 = spec_.h * spec_.h;
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t k = nodes_[r];
        const int i = spec_.i_of(k);
        const int j = spec_.j_of(k);
        double d = h2 * op.potential_node(k);
        for (int f = 0; f < 4; ++f) {
            const std::size_t kn = spec_.index(i + di[f], j + dj[f]);
            const double a = face_coefficient(op, k, kn);
            const int b = domain.crossing(k, f);
            if (b >= 0) {
                const double theta = std::max(domain.boundary()[static_cast<std::size_t>(b)].theta, theta_floor);
                coef_[4 * r + f] = a / theta;
                bslot_[4 * r + f] = b;
            } else {
                if (local_[kn] < 0) throw Error(ErrorCode::invalid_argument, "interior node has an exterior neighbour without a crossing");
                coef_[4 * r + f] = a;
                nbr_[4 * r + f] = local_[kn];
            }
            d += coef_[4 * r + f];
        }
        diag_[r] = d;
    }
    slot_count_ = domain.boundary().size();
    finalize();
}

EllipticSystem EllipticSystem::box(const OperatorDesc& op, const GridSpec& spec) {
    if (op.has_coefficient() && !(op.coefficient().spec() == spec)) {
        throw Error(ErrorCode::spec_mismatch, "operator coefficient lives on a different grid");
    }
    EllipticSystem s(spec);
    const std::size_t n = spec.size();
    s.local_.assign(n, -1);
    for (int j = 1; j < spec.ny - 1; ++j) {
        for (int i = 1; i < spec.nx - 1; ++i) {
            const std::size_t k = spec.index(i, j);
            s.local_[k] = static_cast<int>(s.nodes_.size());
            s.nodes_.push_back(k);
        }
    }
    const std::size_t m = s.nodes_.size();
    s.nbr_.assign(4 * m, -1);
    s.coef_.assign(4 * m, 0.0);
    s.bslot_.assign(4 * m, -1);
    s.diag_.assign(m, 0.0);
    const double h2 = spec.h * spec.h;
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t k = s.nodes_[r];
        const int i = spec.i_of(k);
        const int j = spec.j_of(k);
        double d = h2 * op.potential_node(k);
        for (int f = 0; f < 4; ++f) {
            const std::size_t kn = spec.index(i + di[f], j + dj[f]);
            const double a = face_coefficient(op, k, kn);
            s.coef_[4 * r + f] = a;
            if (s.local_[kn] >= 0) {
                s.nbr_[4 * r + f] = s.local_[kn];
            } else {
                s.bslot_[4 * r + f] = static_cast<int>(kn);
            }
            d += a;
        }
        s.diag_[r] = d;
    }
    s.slot_count_ = n;
    s.finalize();
    return s;
}

void EllipticSystem::finalize() {
    for (std::size_t r = 0; r < nodes_.size(); ++r) {
        const std::size_t k = nodes_[r];
        ((spec_.i_of(k) + spec_.j_of(k)) % 2 == 0 ? red_ : black_).push_back(r);
    }
    const double area = static_cast<double>(std::max<std::size_t>(nodes_.size(), 1)) * spec_.h * spec_.h;
    const double lambda1 = pi * j01 * j01 / area;
    const double rho = std::clamp(1.0 - lambda1 * spec_.h * spec_.h / 4.0, 0.0, 1.0 - 1e-12);
    omega_ = 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
}

std::vector<double> EllipticSystem::build_rhs(const ScalarField& rhs, std::span<const double> boundary) const {
    if (!(rhs.spec() == spec_)) throw Error(ErrorCode::spec_mismatch, "right-hand side lives on a different grid");
    if (boundary.size() != slot_count_) throw Error(ErrorCode::spec_mismatch, "boundary data size mismatch");
    const double h2 = spec_.h * spec_.h;
    std::vector<double> b(nodes_.size());
    for (std::size_t r = 0; r < nodes_.size(); ++r) {
        double v = -h2 * rhs[nodes_[r]];
        for (int f = 0; f < 4; ++f) {
            const int s = bslot_[4 * r + f];
            if (s >= 0) v += coef_[4 * r + f] * boundary[static_cast<std::size_t>(s)];
        }
        b[r] = v;
    }
    return b;
}

double EllipticSystem::residual_norm(const std::vector<double>& u, const std::vector<double>& b) const {
    double sum = 0.0;
    for (std::size_t r = 0; r < nodes_.size(); ++r) {
        double ax = diag_[r] * u[r];
        for (int f = 0; f < 4; ++f) {
            const int q = nbr_[4 * r + f];
            if (q >= 0) ax -= coef_[4 * r + f] * u[static_cast<std::size_t>(q)];
        }
        const double res = b[r] - ax;
        sum += res * res;
    }
    return std::sqrt(sum);
}

bool EllipticSystem::conjugate_gradient(std::vector<double>& u, const std::vector<double>& b, double bnorm,
                                        const SolverOptions& options, SolverReport& report) const {
    const std::size_t m = nodes_.size();
    auto apply_a = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t r = 0; r < m; ++r) {
            double v = diag_[r] * x[r];
            for (int f = 0; f < 4; ++f) {
                const int q = nbr_[4 * r + f];
                if (q >= 0) v -= coef_[4 * r + f] * x[static_cast<std::size_t>(q)];
            }
            y[r] = v;
        }
    };
    std::vector<double> r(m), z(m), p(m), ap(m);
    apply_a(u, ap);
    for (std::size_t i = 0; i < m; ++i) r[i] = b[i] - ap[i];
    for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / diag_[i];
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < m; ++i) rz += r[i] * z[i];
    for (int it = 1; it <= options.max_cg_iterations; ++it) {
        apply_a(p, ap);
        double pap = 0.0;
        for (std::size_t i = 0; i < m; ++i) pap += p[i] * ap[i];
        if (!(pap > 0.0)) break;
        const double alpha = rz / pap;
        double rr = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            u[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            rr += r[i] * r[i];
        }
        report.iterations += 1;
        report.residual = std::sqrt(rr) / bnorm;
        if (report.residual <= options.tolerance) return true;
        double rz_new = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            z[i] = r[i] / diag_[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
    }
    report.residual = residual_norm(u, b) / bnorm;
    return report.residual <= options.tolerance;
}

ScalarField EllipticSystem::solve(const ScalarField& rhs, std::span<const double> boundary, const ScalarField* guess,
                                  const SolverOptions& options, SolverReport* report_out) const {
    const std::vector<double> b = build_rhs(rhs, boundary);
    const std::size_t m = nodes_.size();
    std::vector<double> u(m, 0.0);
    if (guess != nullptr) {
        if (!(guess->spec() == spec_)) throw Error(ErrorCode::spec_mismatch, "initial guess lives on a different grid");
        for (std::size_t r = 0; r < m; ++r) u[r] = (*guess)[nodes_[r]];
    }
    SolverReport report;
    report.omega = options.omega > 0.0 ? options.omega : omega_;
    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);

    ScalarField out(spec_);
    if (bnorm == 0.0) {
        if (report_out != nullptr) *report_out = report;
        return out;
    }
    const double omega = report.omega;
    auto sweep_color = [&](const std::vector<std::size_t>& color) {
        for (std::size_t r : color) {
            double sigma = b[r];
            for (int f = 0; f < 4; ++f) {
                const int q = nbr_[4 * r + f];
                if (q >= 0) sigma += coef_[4 * r + f] * u[static_cast<std::size_t>(q)];
            }
            u[r] += omega * (sigma / diag_[r] - u[r]);
        }
    };
    report.residual = residual_norm(u, b) / bnorm;
    bool converged = report.residual <= options.tolerance;
    while (!converged && report.iterations < options.max_sweeps) {
        for (int s = 0; s < 10; ++s) {
            sweep_color(red_);
            sweep_color(black_);
        }
        report.iterations += 10;
        report.residual = residual_norm(u, b) / bnorm;
        if (!std::isfinite(report.residual)) break;
        converged = report.residual <= options.tolerance;
    }
    if (!converged) {
        report.used_cg = true;
        if (!std::isfinite(report.residual)) std::fill(u.begin(), u.end(), 0.0);
        converged = conjugate_gradient(u, b, bnorm, options, report);
    }
    if (report_out != nullptr) *report_out = report;
    if (!converged) {
        throw Error(ErrorCode::non_convergence,
                    "elliptic solve stalled at relative residual " + std::to_string(report.residual));
    }
    for (std::size_t r = 0; r < m; ++r) out[nodes_[r]] = u[r];
    return out;
}

ScalarField EllipticSystem::solve_obstacle(const ScalarField& rhs, std::span<const double> boundary,
                                           const ScalarField& obstacle, double step_tolerance, int max_sweeps,
                                           SolverReport* report_out,
                                           std::vector<std::pair<int, double>>* trace) const {
    if (!(obstacle.spec() == spec_)) throw Error(ErrorCode::spec_mismatch, "obstacle lives on a different grid");
    const std::vector<double> b = build_rhs(rhs, boundary);
    const std::size_t m = nodes_.size();
    std::vector<double> u(m);
    for (std::size_t r = 0; r < m; ++r) u[r] = obstacle[nodes_[r]];
    SolverReport report;
    report.omega = omega_;
    const double omega = omega_;
    double change = 0.0;
    auto sweep_color = [&](const std::vector<std::size_t>& color) {
        for (std::size_t r : color) {
            double sigma = b[r];
            for (int f = 0; f < 4; ++f) {
                const int q = nbr_[4 * r + f];
                if (q >= 0) sigma += coef_[4 * r + f] * u[static_cast<std::size_t>(q)];
            }
            const double next = std::max(obstacle[nodes_[r]], u[r] + omega * (sigma / diag_[r] - u[r]));
            change = std::max(change, std::abs(next - u[r]));
            u[r] = next;
        }
    };
    bool converged = false;
    while (report.iterations < max_sweeps) {
        change = 0.0;
        sweep_color(red_);
        sweep_color(black_);
        report.iterations += 1;
        report.residual = change;
        if (!std::isfinite(change)) break;
        if (change <= step_tolerance) {
            converged = true;
            break;
        }
        if (trace != nullptr && report.iterations % 10 == 0) trace->emplace_back(report.iterations, change);
    }
    if (trace != nullptr) trace->emplace_back(report.iterations, report.residual);
    if (report_out != nullptr) *report_out = report;
    if (!converged) {
        throw Error(ErrorCode::non_convergence,
                    "projected SOR did not settle; last step " + std::to_string(report.residual));
    }
    ScalarField out(spec_);
    for (std::size_t r = 0; r < m; ++r) out[nodes_[r]] = u[r];
    return out;
}

ScalarField EllipticSystem::apply(const ScalarField& u, std::span<const double> boundary) const {
    if (!(u.spec() == spec_)) throw Error(ErrorCode::spec_mismatch, "field lives on a different grid");
    if (boundary.size() != slot_count_) throw Error(ErrorCode::spec_mismatch, "boundary data size mismatch");
    const double h2 = spec_.h * spec_.h;
    ScalarField out(spec_);
    for (std::size_t r = 0; r < nodes_.size(); ++r) {
        const std::size_t k = nodes_[r];
        double v = -diag_[r] * u[k];
        for (int f = 0; f < 4; ++f) {
            const int q = nbr_[4 * r + f];
            const int s = bslot_[4 * r + f];
            if (q >= 0) v += coef_[4 * r + f] * u[nodes_[static_cast<std::size_t>(q)]];
            else if (s >= 0) v += coef_[4 * r + f] * boundary[static_cast<std::size_t>(s)];
        }
        out[k] = v / h2;
    }
    return out;
}

// ---- DirectSolver ------------------------------------------------------------------

struct DirectSolver::Impl {
    explicit Impl(const EllipticSystem& s) : system(s) {}
    EllipticSystem system;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor;
};

DirectSolver::DirectSolver(const EllipticSystem& system) : impl_(std::make_unique<Impl>(system)) {
    const EllipticSystem& s = impl_->system;
    const auto m = static_cast<Eigen::Index>(s.nodes_.size());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(5 * s.nodes_.size());
    for (std::size_t r = 0; r < s.nodes_.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        entries.emplace_back(row, row, s.diag_[r]);
        for (int f = 0; f < 4; ++f) {
            const int q = s.nbr_[4 * r + f];
            if (q >= 0) entries.emplace_back(row, static_cast<Eigen::Index>(q), -s.coef_[4 * r + f]);
        }
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(entries.begin(), entries.end());
    impl_->factor.compute(A);
    if (impl_->factor.info() != Eigen::Success) {
        throw Error(ErrorCode::non_convergence, "sparse factorization failed");
    }
}

DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

const EllipticSystem& DirectSolver::system() const { return impl_->system; }

ScalarField DirectSolver::solve(const ScalarField& rhs, std::span<const double> boundary) const {
    const EllipticSystem& s = impl_->system;
    const std::vector<double> b = s.build_rhs(rhs, boundary);
    const Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXd u = impl_->factor.solve(bv);
    ScalarField out(s.spec_);
    for (std::size_t r = 0; r < s.nodes_.size(); ++r) out[s.nodes_[r]] = u[static_cast<Eigen::Index>(r)];
    return out;
}

}  // namespace egrowth
