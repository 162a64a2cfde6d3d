#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egrowth/balayage.hpp"
#include "egrowth/green.hpp"

namespace egrowth {

/// One row of the run log.
struct MomentSample {
    int step = 0;
    double t = 0.0;
    double area = 0.0;
    std::array<std::complex<double>, 5> moments{};  // t_0 .. t_4
    double rate = 0.0;      // finite-difference area rate over the last step (0 for the first row)
    double flux = 0.0;      // boundary integral of v_n at the start of the step
    double max_vn = 0.0;
    int solver_iters = 0;
    std::array<double, 5> abs_moments{};  // integral of |z|^n over D, n = 0..4
    std::vector<double> test_integrals;   // integrals of the state's test functions over D
};

struct GrowthState {
    double t = 0.0;
    int step = 0;
    GridDomain D;
    OperatorDesc op = OperatorDesc::laplace();
    Point w;
    double Q = 1.0;
    /// Optional L-harmonic test functions integrated at every sample.
    std::vector<ScalarField> test_functions;
    std::vector<MomentSample> moment_log;

    /// Validates the configuration and records the first sample.
    static GrowthState start(GridDomain D, OperatorDesc op, Point w, double Q,
                             std::vector<ScalarField> test_functions = {});
};

struct StrongOptions {
    double cfl = 0.4;        // dt = cfl * h / max v_n when stepping automatically
    int reinit_every = 5;
    SolverOptions solver;
};

/// Normal velocity Q lambda d_n g_w on the boundary of the current domain.
BoundaryProfile normal_velocity(const GrowthState& state, const SolverOptions& options = {},
                                SolverReport* report = nullptr);

/// Advances the level set by dt. Throws cfl_violation when dt > h / max v_n and
/// out_of_bounds when the interface comes within three cells of the grid edge.
GrowthState strong_step(const GrowthState& state, double dt, const StrongOptions& options = {});

/// Steps with dt = cfl * h / max v_n (clipped to land on t_end) until t_end.
/// `observer` sees every new state.
GrowthState grow_strong(GrowthState state, double t_end, const StrongOptions& options = {},
                        const std::function<void(const GrowthState&)>& observer = {});
/// Steps until the area reaches `target_area`, finishing with a shortened step.
GrowthState grow_strong_to_area(GrowthState state, double target_area, const StrongOptions& options = {});

/// Bal(chi_D + Q dt delta_w, 1) on a lattice-aligned box around the support;
/// refused for the schrodinger family, which has no balayage formulation.
GrowthState weak_step(const GrowthState& state, double dt, const SolverOptions& options = {});

/// Mask containment with one-cell slack: nodes of `before` that are neither
/// inside `after` nor next to an inside node.
int nesting_violations(const GridDomain& before, const GridDomain& after);

struct MomentReport {
    int samples = 0;
    double rate_min = 0.0;
    double rate_max = 0.0;
    double rate_mean = 0.0;
    /// max_t |t_n(t) - t_n(0) - Q t w^n| / integral of |z|^n over D(0), n = 0..4
    std::array<double, 5> drift{};
    /// per test function: max relative error of d/dt integral against Q phi(w)
    std::vector<double> test_rate_error;
    double max_rate_deviation(double expected) const;
};

MomentReport moment_trace(const GrowthState& state);

/// L-harmonic functions with boundary data 1, x, y, x^2 - y^2, xy on a disk
/// about `center` of radius `radius`; zero outside that disk.
std::vector<ScalarField> l_harmonic_test_functions(const OperatorDesc& op, const GridSpec& spec, Point center,
                                                   double radius,
                                                   const SolverOptions& options = {});

/// sqrt(lambda(0) / lambda(R)) for a radial, nondecreasing lambda.
double radial_area_rate(const std::function<double(double)>& lambda, double R);

/// Area rate of the schrodinger growth of the centred disk of radius R with
/// potential u(r), measured by finite differences over a short strong run on
/// an n x n grid fitted to the disk.
double measured_radial_rate(const std::function<double(double)>& u, double R, int n = 256);

/// Initial area rates for disks of the given radii about w (flux of the Green function).
std::vector<double> initial_rate_probe(const std::function<double(Point)>& u, Point w,
                                       std::span<const double> radii = {}, int n = 256);

struct RateVerdict {
    bool reject = false;
    std::vector<double> rates;
    double worst_ratio = 0.0;  // min |dA/dt| / A
    std::string reason;
};

/// REJECT when some finite-difference |dA/dt| <= 1e-3 A.
RateVerdict reject_zero_rate_families(std::span<const double> times, std::span<const double> areas);
RateVerdict reject_zero_rate_families(const std::function<GridDomain(double)>& family, std::span<const double> times);

}  // namespace egrowth
