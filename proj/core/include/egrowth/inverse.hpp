#pragma once

#include <array>
#include <string>
#include <vector>

#include "egrowth/green.hpp"

namespace egrowth {

/// Au(zeta) = integral over D of u g_w P_zeta dA, evaluated as the normal
/// derivative of psi with Laplacian(psi) = u g_w and zero boundary data.
/// The factorization and g_w are built once and reused across calls.
class ForwardOperator {
public:
    ForwardOperator(const GridDomain& D, Point w);

    BoundaryProfile apply(const ScalarField& u) const;
    const GridDomain& domain() const { return domain_; }
    const GreenSolution& green_function() const { return green_; }

private:
    GridDomain domain_;
    DirectSolver solver_;
    GreenSolution green_;
};

BoundaryProfile forward_A(const ScalarField& u, const GridDomain& D, Point w);

/// Boundary L2 norm sqrt(sum f^2 ds).
double boundary_norm(const BoundaryProfile& f, const GridDomain& D);

struct PreimageResult {
    std::vector<double> coefficients;  // of x^i y^j, index i + (degree + 1) j
    int degree = 0;
    ScalarField u;
    BoundaryProfile image;
    double residual = 0.0;     // boundary L2 norm of A u - target
    double target_norm = 0.0;
    double relative_residual() const { return residual / target_norm; }
};

/// Least-squares u in span{x^i y^j : i, j <= degree} minimizing |A u - target|.
PreimageResult least_squares_preimage(const ForwardOperator& A, const BoundaryProfile& target, int degree = 5);

/// lambda d_n g_p on the boundary: the velocity profile produced by pumping at p.
BoundaryProfile pumping_response(const ScalarField& lambda, const GridDomain& D, Point p);

/// N_lambda f = d_n u with div(lambda grad u) = 0 in D and u = f on the boundary.
BoundaryProfile dtn_direct(const ScalarField& lambda, const GridDomain& D, const BoundaryProfile& f);

/// Dissipated power: integral of f lambda d_n u over the boundary.
double power_functional(const ScalarField& lambda, const GridDomain& D, const BoundaryProfile& f);

/// Boundary nodes whose normal derivative is reconstructed, and the probe
/// depths (in cells) along the inward normal.
struct ProbeSet {
    std::vector<std::size_t> nodes;
    std::array<double, 3> depths{3.5, 4.5, 5.5};

    static ProbeSet every(const GridDomain& D, std::size_t stride = 1);
};

/// DtN map through pumping responses: u(p) = f(zeta) + integral of (f - f(zeta)) V_p ds
/// at probes on the normal through zeta, then a one-sided normal difference.
/// The responses are computed once and reused for every f.
class ResponseDtN {
public:
    ResponseDtN(const ScalarField& lambda, const GridDomain& D, ProbeSet probes);

    /// Values at the probed nodes; other entries are NaN.
    BoundaryProfile apply(const BoundaryProfile& f) const;
    const ProbeSet& probes() const { return probes_; }

private:
    GridDomain domain_;
    ProbeSet probes_;
    // responses_[3 * q + m][b]: V at probe m of probed node q, times ds_b
    std::vector<std::vector<double>> responses_;
};

BoundaryProfile dtn_from_response(const ScalarField& lambda, const GridDomain& D, const BoundaryProfile& f,
                                  const ProbeSet& probes);

/// Fourier modes 1, cos(k theta), sin(k theta) for k <= order, theta the polar
/// angle of each boundary node about the domain centroid.
std::vector<BoundaryProfile> fourier_modes(const GridDomain& D, int order);

struct DtNMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> matrix;  // M[i][j] = <mode_i, N mode_j>

    /// max |M_ij - M_ji| / max |M|
    double symmetry_defect() const;
    std::string to_csv() const;
};

/// Modes up to `order` (at most 6; higher modes are under-resolved at 256^2).
DtNMatrix dtn_matrix(const ScalarField& lambda, const GridDomain& D, int order);

struct TwoPointReport {
    double gap_w = 0.0;   // max |V_w(lambda1) - V_w(lambda2)|
    double gap_xi = 0.0;
    double scale_w = 0.0;
    double scale_xi = 0.0;
    std::string to_json() const;
};

/// Records how well two pumping points separate two permeabilities. Asserts nothing.
TwoPointReport two_point_response_experiment(const ScalarField& lambda1, const ScalarField& lambda2, const GridDomain& D,
                                             Point w, Point xi);

}  // namespace egrowth
