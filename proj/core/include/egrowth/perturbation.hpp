#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "egrowth/green.hpp"

namespace egrowth {

/// Comparison of a first-order formula against direct re-solves at two
/// perturbation sizes eps and eps/2.
struct VariationReport {
    std::string name;
    std::vector<double> epsilons;
    /// ||direct(eps) - (base + eps F)|| for each epsilon (max norm).
    std::vector<double> defects;
    /// defects[0] / defects[1]; near 4 for a correct first-order formula.
    double ratio = 0.0;
    /// Norm of the first-order coefficient F.
    double coefficient_norm = 0.0;
    double ratio_lo = 3.0;
    double ratio_hi = 5.5;

    bool pass() const { return ratio >= ratio_lo && ratio <= ratio_hi; }
    std::string to_json() const;
};

/// Builds a report from base values, the first-order coefficient, and a
/// direct solver evaluated at eps and eps/2.
VariationReport defect_study(std::string name, const std::vector<double>& base, const std::vector<double>& coefficient,
                             const std::function<std::vector<double>(double)>& direct, double eps);

// ---- domain variation ---------------------------------------------------------

/// -integral over the boundary of p lambda d_n g_z d_n g_w ds. With lambda
/// absent the Green functions are those of the Laplacian.
double hadamard_variation(const GridDomain& domain, Point w, Point z, const BoundaryProfile& p,
                          const std::optional<ScalarField>& lambda = std::nullopt);

/// Hadamard formula against re-solves on the family domain(eps), which must
/// move the boundary of domain(0) outward by eps * p.
VariationReport hadamard_defect(const std::function<GridDomain(double)>& family, Point w, Point z,
                                const std::function<double(const BoundaryNode&)>& p, double eps,
                                const std::optional<ScalarField>& lambda = std::nullopt);

struct ZeroCurvatureReport {
    double abc = 0.0;  // -int dn g_a dn g_b dn g_c ds
    double bca = 0.0;
    double cab = 0.0;
    double max_relative_gap = 0.0;
};

ZeroCurvatureReport zero_curvature_check(const GridDomain& domain, Point a, Point b, Point c,
                                         const std::optional<ScalarField>& lambda = std::nullopt);

// ---- operator variation ---------------------------------------------------------------

struct SeriesResult {
    ScalarField total;                // partial sum of eps^n (T u)^n g_w
    std::vector<double> term_norms;   // max norm of each added term (eps^n included)
    double guard = 0.0;               // eps ||u|| ||T||
    double truncation_estimate() const { return term_norms.empty() ? 0.0 : term_norms.back(); }
};

/// Green function of Laplacian - eps u by n_terms corrections of the series
/// g + eps T(u g) + eps^2 T(u T(u g)) + ...
SeriesResult schrodinger_green_series(const GridDomain& domain, const ScalarField& u, Point w, double eps, int n_terms,
                                      const SolverOptions& options = {});

/// Series with one correction against direct Schrodinger re-solves (max norm over D).
VariationReport schrodinger_series_defect(const GridDomain& domain, const ScalarField& u, Point w, double eps);

enum class BeltramiFormula { gradient, laplacian };

/// First-order coefficient F in g*(z, w) = g(z, w) + eps F + o(eps) for the
/// operator div((1 + eps p) grad).
double beltrami_green_variation(const GridDomain& domain, const ScalarField& p, Point w, Point z,
                                BeltramiFormula formula);

VariationReport beltrami_defect(const GridDomain& domain, const ScalarField& p, Point w, Point z, double eps,
                                BeltramiFormula formula);

// ---- normal-derivative variation -------------------------------------------------------

/// First-order coefficient of d_n g_w on the boundary for Laplacian - eps u:
/// the integral of u g_w P_zeta over D, at every boundary node.
BoundaryProfile normal_variation_schrodinger_coefficient(const GridDomain& domain, const ScalarField& u, Point w);
/// d_n g_w(zeta) + eps * coefficient(zeta).
double normal_variation_schrodinger(const GridDomain& domain, const ScalarField& u, Point w, std::size_t zeta, double eps);

/// First-order coefficient of d_n g_w for div((1 + eps u) grad):
/// (1/2)[int Lap(u) g_w P_zeta dA - d_n g_w(zeta) (u(zeta) + u(w))].
BoundaryProfile normal_variation_beltrami_coefficient(const GridDomain& domain, const ScalarField& u, Point w);
double normal_variation_beltrami(const GridDomain& domain, const ScalarField& u, Point w, std::size_t zeta, double eps);

VariationReport normal_schrodinger_defect(const GridDomain& domain, const ScalarField& u, Point w, double eps);
VariationReport normal_beltrami_defect(const GridDomain& domain, const ScalarField& u, Point w, double eps);

/// Five-point Laplacian by central differences (zero on the outer ring).
ScalarField discrete_laplacian(const ScalarField& f);

}  // namespace egrowth
