#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "egrowth/grid.hpp"
#include "egrowth/operator.hpp"
#include "egrowth/solver.hpp"

namespace egrowth {

enum class KernelKind { newtonian, elliptic };

/// Potential of a measure on a computational box: L field = source.
/// Atoms are represented analytically by (2 pi lambda(w))^-1 ln|z - w|; the
/// remainder (density part plus elliptic correctors) is a grid solve.
struct PotentialField {
    KernelKind kind = KernelKind::newtonian;
    Measure source;
    std::vector<double> atom_lambda;  // lambda at each atom (1 for newtonian)
    ScalarField smooth;               // grid part
    ScalarField field;                // smooth + atoms, atoms cell-averaged near their centres
    std::optional<ScalarField> lambda;

    /// Pointwise value (atoms evaluated exactly).
    double value_at(Point z) const;
};

/// Box of the measure's lattice covering its support inflated by `factor`
/// about the support centre, never smaller than `min_nodes` per side.
GridSpec balayage_box(const Measure& mu, double factor = 2.5, int min_nodes = 64);

/// Copies a measure (or field) onto another lattice-aligned grid. Density
/// outside the target box is an error; fields are clamped to the nearest node.
Measure transfer(const Measure& mu, const GridSpec& box);
ScalarField transfer(const ScalarField& f, const GridSpec& box);

PotentialField newtonian_potential(const Measure& mu, const GridSpec& box, const SolverOptions& options = {});
PotentialField elliptic_potential(const Measure& mu, const ScalarField& lambda, const GridSpec& box,
                                  const SolverOptions& options = {});

/// max |L_h smooth + L(atoms) - density| over interior box nodes at least
/// `clearance` cells from every atom.
double potential_residual(const PotentialField& p, double clearance = 3.0);

struct BalayageResult {
    ScalarField V;
    PotentialField potential;
    ScalarField result_density;           // L_h V on interior box nodes
    std::vector<std::uint8_t> saturated;  // |L_h V - 1| <= 1e-6
    int iterations = 0;
    double residual = 0.0;                // last projected-SOR step size
    double input_mass = 0.0;
    double result_mass = 0.0;
    std::vector<std::pair<int, double>> trace;  // (sweep, step) samples

    double mass_error() const;
    /// Largest of: obstacle violation, excess density, complementarity defect.
    double complementarity_residual() const;
    /// Saturated-set area with density weights (integral of result_density).
    double swept_area() const;
};

/// Bal(mu, 1): the smallest V with V >= potential and L V <= 1, solved by
/// projected SOR. Throws mass_conservation when the result loses more than 0.5%.
BalayageResult partial_balayage(const Measure& mu, const std::optional<ScalarField>& lambda, const GridSpec& box,
                                const SolverOptions& options = {});

/// Max |potential(result) - potential(mu)| outside the saturated set inflated by 3 cells.
double quadrature_domain_check(const Measure& mu, const BalayageResult& result);

/// Signed-distance-like implicit function of the swept domain, negative inside,
/// built from the quadratic contact law V - potential ~ (1 - rho) d^2 / (2 lambda).
std::vector<double> swept_domain_implicit(const BalayageResult& result);

}  // namespace egrowth
