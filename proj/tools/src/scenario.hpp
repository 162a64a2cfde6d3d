#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "egrowth/grid.hpp"
#include "egrowth/operator.hpp"
#include "expression.hpp"

namespace egrowth::cli {

/// Bad config text or values. `where` is "line L, column C" for syntax errors
/// and the dotted field path otherwise.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct GridConfig {
    Point origin{-2.0, -2.0};
    double h = 4.0 / 255.0;
    int nx = 256;
    int ny = 256;

    GridSpec spec() const { return {origin, h, nx, ny}; }
    /// Same bounding box with n nodes along x.
    void resample(int n);
};

struct DomainConfig {
    std::string shape = "disk";  // disk | ellipse | star
    Point center;
    double radius = 1.0;  // disk, star
    double a = 1.0;       // ellipse semi-axes
    double b = 1.0;
    double amplitude = 0.0;  // star: r = radius (1 + amplitude cos(mode theta))
    int mode = 3;

    GridDomain build(const GridSpec& spec) const;
};

struct OperatorConfig {
    OperatorKind kind = OperatorKind::laplace;
    std::optional<Expression> coefficient;  // lambda or u

    OperatorDesc build(const GridSpec& spec) const;
    /// lambda as a field (1 unless beltrami).
    ScalarField lambda(const GridSpec& spec) const;
};

struct SourceConfig {
    Point w;
    double Q = 1.0;
};

struct RunConfig {
    std::string mode = "strong";  // strong | weak
    double t_end = 1.0;
    double cfl = 0.4;
    int snapshot_stride = 10;
    int weak_frames = 1;
};

struct PerturbConfig {
    std::string kind = "hadamard";  // hadamard | schrodinger_series | beltrami | normal_schrodinger | normal_beltrami
    double eps = 0.02;
    Point z{0.3, 0.0};
    Expression field = Expression::constant(1.0);
    std::string formula = "gradient";
};

struct BalayageConfig {
    std::vector<Atom> atoms;
    bool include_domain = false;
    /// > 0: use a lattice-aligned box inflated by this factor instead of the grid.
    double box_factor = 0.0;
};

struct RatesConfig {
    std::vector<double> radii{0.5, 1.0};
    std::vector<double> probe_radii{0.4, 0.2, 0.1};
};

struct ScenarioConfig {
    std::string command;
    GridConfig grid;
    DomainConfig domain;
    OperatorConfig op;
    SourceConfig source;
    RunConfig run;
    std::string output;
    std::vector<Point> probes;                       // green
    std::optional<Expression> boundary_data;         // dirichlet
    PerturbConfig perturb;
    BalayageConfig balayage;
    RatesConfig rates;
    int dtn_order = 6;
    nlohmann::json echo;  // the input as parsed

    GridDomain build_domain() const;
};

/// Parses config text for `command` (the subcommand on the command line).
ScenarioConfig parse_scenario(const std::string& text, const std::string& command);
ScenarioConfig load_scenario(const std::string& path, const std::string& command);
/// Defaults only, for subcommands run without --config.
ScenarioConfig default_scenario(const std::string& command);

}  // namespace egrowth::cli
