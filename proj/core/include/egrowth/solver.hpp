#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "egrowth/grid.hpp"
#include "egrowth/operator.hpp"

namespace egrowth {

struct SolverOptions {
    double tolerance = 1e-10;   // relative residual ||b - Au|| / ||b||
    int max_sweeps = 50000;     // SOR sweeps before falling back to CG
    int max_cg_iterations = 20000;
    double omega = 0.0;         // 0 selects the eigenvalue-based estimate
};

struct SolverReport {
    int iterations = 0;
    double residual = 0.0;
    double omega = 0.0;
    bool used_cg = false;
};

/// Five-point discretization of an operator family on a set of unknown nodes.
///
/// Domain mode: unknowns are the interior nodes of a GridDomain; an edge that
/// crosses the interface is closed with a ghost value linearly extrapolated
/// through the boundary value at the crossing (distance theta*h). Box mode:
/// unknowns are every node except the outermost ring, whose values are the
/// Dirichlet data.
///
/// Rows read  L_h u = rhs  with  L_h u_i = h^-2 sum_f a_f c_f (u_f - u_i) - s_i u_i.
class EllipticSystem {
public:
    EllipticSystem(const OperatorDesc& op, const GridDomain& domain);
    static EllipticSystem box(const OperatorDesc& op, const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    std::size_t unknowns() const { return nodes_.size(); }
    /// Boundary values: one per boundary node (domain mode) or one per grid
    /// node with only the outer ring read (box mode).
    std::size_t boundary_slots() const { return slot_count_; }

    /// Solves L_h u = rhs. Non-unknown nodes of the result are zero.
    ScalarField solve(const ScalarField& rhs, std::span<const double> boundary,
                      const ScalarField* guess = nullptr, const SolverOptions& options = {},
                      SolverReport* report = nullptr) const;

    /// Projected SOR for  min u  s.t.  u >= obstacle, L_h u <= rhs  (complementarity
    /// form). Stops when a sweep changes no value by more than `step_tolerance`.
    /// `trace` collects (sweep, step) every 10 sweeps and at the end.
    ScalarField solve_obstacle(const ScalarField& rhs, std::span<const double> boundary,
                               const ScalarField& obstacle, double step_tolerance, int max_sweeps,
                               SolverReport* report = nullptr,
                               std::vector<std::pair<int, double>>* trace = nullptr) const;

    /// L_h u at every unknown node (zero elsewhere).
    ScalarField apply(const ScalarField& u, std::span<const double> boundary) const;

    /// Estimated SOR relaxation factor.
    double estimated_omega() const { return omega_; }

private:
    friend class DirectSolver;
    explicit EllipticSystem(const GridSpec& spec) : spec_(spec) {}
    void finalize();
    std::vector<double> build_rhs(const ScalarField& rhs, std::span<const double> boundary) const;
    double residual_norm(const std::vector<double>& u, const std::vector<double>& b) const;
    bool conjugate_gradient(std::vector<double>& u, const std::vector<double>& b, double bnorm,
                            const SolverOptions& options, SolverReport& report) const;

    GridSpec spec_;
    std::vector<std::size_t> nodes_;   // grid index per unknown
    std::vector<int> local_;           // unknown index per grid node, -1 otherwise
    std::vector<int> nbr_;             // 4 per unknown: neighbour unknown or -1
    std::vector<double> coef_;         // 4 per unknown: a_f c_f / h^2
    std::vector<int> bslot_;           // 4 per unknown: boundary slot or -1
    std::vector<double> diag_;
    std::vector<std::size_t> red_, black_;
    std::size_t slot_count_ = 0;
    double omega_ = 1.0;
};

/// Sparse Cholesky factorization of an EllipticSystem. Solves are linear in the
/// data to rounding and cheap once factored, which suits many right-hand sides.
class DirectSolver {
public:
    explicit DirectSolver(const EllipticSystem& system);
    ~DirectSolver();
    DirectSolver(DirectSolver&&) noexcept;
    DirectSolver& operator=(DirectSolver&&) noexcept;

    const EllipticSystem& system() const;
    /// Same contract as EllipticSystem::solve.
    ScalarField solve(const ScalarField& rhs, std::span<const double> boundary) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace egrowth
