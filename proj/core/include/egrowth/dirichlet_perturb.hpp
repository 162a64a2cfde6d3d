#pragma once

#include <string>
#include <vector>

#include "egrowth/green.hpp"

namespace egrowth {

/// phi0 + eps psi for (Laplacian - eps u) phi = 0, phi = f on the boundary,
/// where phi0 is harmonic with data f and Laplacian(psi) = u phi0 with zero data.
ScalarField dirichlet_schrodinger_first_order(const GridDomain& domain, const ScalarField& u, const BoundaryProfile& f,
                                              double eps);

/// phi0 + eps psi for div((1 + eps u) grad phi) = 0, phi = f on the boundary,
/// where Laplacian(psi) = -grad u . grad phi0 with zero data.
ScalarField dirichlet_beltrami_first_order(const GridDomain& domain, const ScalarField& u, const BoundaryProfile& f,
                                           double eps);

struct GreenAreaMoment {
    double quadrature = 0.0;
    double closed_form = 0.0;  // -(1 - |z|^{2n+2}) / (4 (n + 1)^2)
};

/// Integral of |xi|^{2n} g_z over the unit disk, by quadrature and in closed form.
GreenAreaMoment green_area_moment(const GridDomain& unit_disk, Point z, int n);

struct LinearizationBound {
    std::vector<Point> probes;
    std::vector<double> variation;  // |first variation| at each probe
    std::vector<double> bound;      // ||u||_2 ||g_z||_2 ||f||_inf
    double worst_ratio = 0.0;
};

/// Checks |first variation| <= ||u||_2 ||g_z||_2 ||f||_inf for the Schrodinger
/// Dirichlet problem at 16 interior probes.
LinearizationBound linearization_bound_check(const GridDomain& domain, const ScalarField& u, const BoundaryProfile& f);

/// L2 norm of g_z over D; the log singularity is integrated by sub-cell quadrature.
double green_l2_norm(const GreenSolution& g);

struct GoldenRow {
    std::string input;
    double reference = 0.0;
    double computed = 0.0;
    double tolerance = 0.0;
    bool relative = false;

    bool pass() const;
};

/// The disk goldens for this module on an n x n grid over [-2, 2]^2.
std::vector<GoldenRow> dirichlet_goldens(int n = 256);

}  // namespace egrowth
