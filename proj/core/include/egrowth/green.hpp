#pragma once

#include <functional>

#include "egrowth/grid.hpp"
#include "egrowth/operator.hpp"
#include "egrowth/solver.hpp"

namespace egrowth {

// ---- log kernel helpers -------------------------------------------------------

/// ln|z - w| / (2 pi)
double log_kernel(Point z, Point w);
/// Average of ln|z - w| / (2 pi) over the h x h square centred on c (exact).
double log_kernel_cell_average(Point c, double h, Point w);
/// Average of grad_z ln|z - w| / (2 pi) over the h x h square centred on c (exact).
Point log_kernel_gradient_cell_average(Point c, double h, Point w);

// ---- Green functions -----------------------------------------------------------

/// g = Q E + h with E(z) = ln|z - w| / (2 pi lambda(w)); total < 0 in D and
/// vanishes on the boundary.
struct GreenSolution {
    OperatorDesc op;
    GridDomain domain;
    Point w;
    double Q = 1.0;
    double lambda_w = 1.0;
    /// Smooth remainder h; extended a few cells past the boundary.
    ScalarField regular;
    /// Q E + h on interior nodes (E cell-averaged within two cells of w), zero outside.
    ScalarField total;
    SolverReport report;

    /// Q E(z).
    double singular(Point z) const;
    Point singular_gradient(Point z) const;
    /// Pointwise g(z); z inside the box.
    double value_at(Point z) const;
};

/// Minimum distance, in cells, between a singularity and the boundary.
inline constexpr double singularity_clearance_cells = 3.0;

GreenSolution green(const OperatorDesc& op, const GridDomain& domain, Point w, double Q = 1.0,
                    const SolverOptions& options = {});
/// Same, reusing a factorization of the operator on this domain.
GreenSolution green(const DirectSolver& solver, const OperatorDesc& op, const GridDomain& domain, Point w,
                    double Q = 1.0);

/// Outward normal derivative of g at every boundary node.
BoundaryProfile normal_derivative(const GreenSolution& g);

/// Outward normal derivative of a field with known boundary values. The
/// field must hold valid values on interior nodes (and, for concave parts of
/// the boundary, on the extension band).
BoundaryProfile normal_derivative(const ScalarField& f, const GridDomain& domain, const BoundaryProfile& boundary_values);

/// Fills exterior band nodes within `cells` of the boundary by quadratic
/// extrapolation along the normal through the boundary value and two interior samples.
void extend_across_boundary(ScalarField& f, const GridDomain& domain,
                            const std::function<double(const BandEntry&)>& boundary_value, double cells = 3.0);

// ---- Dirichlet problems ------------------------------------------------------------

/// Solves L phi = rhs in D, phi = f on the boundary. The result is extended
/// across the boundary.
ScalarField solve_dirichlet(const OperatorDesc& op, const GridDomain& domain, const ScalarField& rhs,
                            const BoundaryProfile& f, const SolverOptions& options = {},
                            SolverReport* report = nullptr);

/// L phi = 0 in D, phi = f on the boundary.
ScalarField dirichlet_solve(const OperatorDesc& op, const GridDomain& domain, const BoundaryProfile& f,
                            const SolverOptions& options = {}, SolverReport* report = nullptr);
ScalarField dirichlet_solve(const OperatorDesc& op, const GridDomain& domain,
                            const std::function<double(Point)>& f, const SolverOptions& options = {},
                            SolverReport* report = nullptr);

/// The operator T: psi with Laplacian(psi) = phi in D and psi = 0 on the boundary,
/// i.e. psi(z) = integral over D of phi g_z dA.
ScalarField apply_T(const GridDomain& domain, const ScalarField& phi, const SolverOptions& options = {});

// ---- Poisson kernel -------------------------------------------------------------------

/// z -> P(zeta, z) = d_n g_z(zeta) for the boundary node zeta, on interior nodes.
/// Built as the half-plane dipole kernel plus a regular Dirichlet correction.
ScalarField poisson_kernel(const OperatorDesc& op, const GridDomain& domain, std::size_t zeta,
                           const SolverOptions& options = {});

/// Integral over D of f(z) P(zeta, z) dA with the kernel's boundary singularity
/// at zeta subtracted and integrated analytically. `kernel` must come from
/// poisson_kernel(op, domain, zeta).
double integrate_against_poisson_kernel(const OperatorDesc& op, const GridDomain& domain, std::size_t zeta,
                                        const ScalarField& kernel, const ScalarField& f);

// ---- Beltrami to Schrodinger ------------------------------------------------------------

struct ConversionResult {
    ScalarField u;            // lambda^{-1/2} Laplacian(lambda^{1/2})
    double discrepancy = 0.0; // max |G_w - g_w sqrt(lambda(w) lambda)| away from w and the boundary
    double scale = 0.0;       // max |G_w| over the same nodes
    bool clamped = false;     // tiny negative u values were clamped to zero
};

/// Potential u of the Schrodinger operator equivalent to div(lambda grad).
ScalarField beltrami_potential(const ScalarField& lambda, bool* clamped = nullptr);

ConversionResult convert_beltrami_to_schrodinger(const ScalarField& lambda, const GridDomain& domain, Point w,
                                                 const SolverOptions& options = {});

}  // namespace egrowth
