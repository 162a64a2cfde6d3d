#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "egrowth/acceptance.hpp"
#include "egrowth/balayage.hpp"
#include "egrowth/green.hpp"
#include "egrowth/growth.hpp"
#include "egrowth/inverse.hpp"
#include "egrowth/io.hpp"
#include "egrowth/perturbation.hpp"
#include "scenario.hpp"

#ifndef EGROWTH_VERSION
#define EGROWTH_VERSION "unknown"
#endif

namespace egrowth::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
    Run(ScenarioConfig c, fs::path dir, bool q, std::ostream& l) : cfg(std::move(c)), out(std::move(dir)), quiet(q), log(l) {}

    ScenarioConfig cfg;
    fs::path out;
    bool quiet = false;
    std::ostream& log;
    json checks = json::array();
    std::vector<std::string> artifacts;
    json summary = json::object();

    void write(const std::string& name, const std::string& text) {
        write_text(out / name, text);
        artifacts.push_back(name);
    }
    void check(const std::string& name, bool pass, double value, double limit) {
        checks.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"limit", limit}});
        if (!quiet) log << (pass ? "  ok   " : "  FAIL ") << name << ": " << value << " (limit " << limit << ")\n";
    }
    void note(const std::string& s) {
        if (!quiet) log << s << '\n';
    }
    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c["pass"].get<bool>(); });
    }
};

json grid_json(const GridSpec& s) {
    return {{"origin", {s.origin.x, s.origin.y}}, {"h", s.h}, {"nx", s.nx}, {"ny", s.ny}};
}

std::vector<std::uint8_t> mask_of(const GridDomain& D) { return {D.mask().begin(), D.mask().end()}; }

// Interior values with the exterior set to the interior minimum, for images.
ScalarField masked(const ScalarField& f, const GridDomain& D) {
    double lo = INFINITY;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (D.inside(k)) lo = std::min(lo, f[k]);
    }
    ScalarField out = f;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!D.inside(k)) out[k] = std::isfinite(lo) ? lo : 0.0;
    }
    return out;
}

void cmd_green(Run& run) {
    const GridSpec spec = run.cfg.grid.spec();
    const GridDomain D = run.cfg.build_domain();
    const OperatorDesc op = run.cfg.op.build(spec);
    const GreenSolution g = green(op, D, run.cfg.source.w, run.cfg.source.Q);
    run.note("green: " + std::to_string(g.report.iterations) + " sweeps");

    const BoundaryProfile dn = normal_derivative(g);
    BoundaryProfile flux = dn;
    const auto nodes = D.boundary();
    for (std::size_t b = 0; b < nodes.size(); ++b) flux[b] = dn[b] * op.lambda_at(nodes[b].position);
    run.write("green.pgm", to_pgm(masked(g.total, D)));
    run.write("mask.pgm", mask_to_pgm(spec, mask_of(D)));
    run.write("boundary.csv", profile_table(D, {{"dn_g", &dn}, {"lambda_dn_g", &flux}}).str());
    CsvTable probes({"x", "y", "g"});
    for (Point p : run.cfg.probes) probes.row(std::vector<double>{p.x, p.y, g.value_at(p)});
    run.write("probes.csv", probes.str());

    double top = -INFINITY;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (D.inside(k)) top = std::max(top, g.total[k]);
    }
    const double total_flux = boundary_integrate(flux, D);
    run.summary = {{"sweeps", g.report.iterations}, {"residual", g.report.residual}, {"lambda_w", g.lambda_w},
                   {"boundary_flux", total_flux}, {"max_interior_value", top}};
    run.check("green nonpositive inside", top <= 0.0, top, 0.0);
    if (op.kind() != OperatorKind::schrodinger && run.cfg.source.Q > 0.0) {
        const double rel = std::abs(total_flux - run.cfg.source.Q) / run.cfg.source.Q;
        run.check("boundary flux equals Q", rel <= 0.02, rel, 0.02);
    }
}

void cmd_dirichlet(Run& run) {
    const GridSpec spec = run.cfg.grid.spec();
    const GridDomain D = run.cfg.build_domain();
    const OperatorDesc op = run.cfg.op.build(spec);
    const Expression& f = *run.cfg.boundary_data;
    const BoundaryProfile data(D, [&](const BoundaryNode& b) { return f(b.position); });
    SolverReport report;
    const ScalarField phi = dirichlet_solve(op, D, data, {}, &report);
    const BoundaryProfile dn = normal_derivative(phi, D, data);
    run.note("dirichlet: " + std::to_string(report.iterations) + " sweeps");
    run.write("phi.pgm", to_pgm(masked(phi, D)));
    run.write("boundary.csv", profile_table(D, {{"f", &data}, {"dn_phi", &dn}}).str());

    const auto v = data.values();
    const double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
    double excess = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (D.inside(k)) excess = std::max({excess, phi[k] - hi, lo - phi[k]});
    }
    run.summary = {{"sweeps", report.iterations}, {"residual", report.residual}, {"data_min", lo}, {"data_max", hi}};
    if (op.kind() != OperatorKind::schrodinger) {
        const double limit = 1e-6 * std::max(1.0, hi - lo);
        run.check("maximum principle", excess <= limit, excess, limit);
    }
}

void cmd_perturb(Run& run) {
    const auto& p = run.cfg.perturb;
    if (run.cfg.op.kind != OperatorKind::laplace) {
        throw ConfigError("operator", "perturb expands about the Laplacian; put the perturbation in perturb.field");
    }
    const GridSpec spec = run.cfg.grid.spec();
    const GridDomain D = run.cfg.build_domain();
    const ScalarField field = ScalarField::sample(spec, p.field);
    const Point w = run.cfg.source.w;
    VariationReport r;
    if (p.kind == "hadamard") {
        const DomainConfig& dc = run.cfg.domain;
        if (dc.shape != "disk") throw ConfigError("perturb.kind", "hadamard moves a disk domain; use shape 'disk'");
        r = hadamard_defect([&](double e) { return make_disk(dc.center, dc.radius + e, spec); }, w, p.z,
                            [](const BoundaryNode&) { return 1.0; }, p.eps);
    } else if (p.kind == "schrodinger_series") {
        r = schrodinger_series_defect(D, field, w, p.eps);
    } else if (p.kind == "beltrami") {
        r = beltrami_defect(D, field, w, p.z, p.eps,
                            p.formula == "gradient" ? BeltramiFormula::gradient : BeltramiFormula::laplacian);
    } else if (p.kind == "normal_schrodinger") {
        r = normal_schrodinger_defect(D, field, w, p.eps);
    } else {
        r = normal_beltrami_defect(D, field, w, p.eps);
    }
    run.write("report.json", r.to_json() + "\n");
    run.summary = json::parse(r.to_json());
    run.check(r.name + " defect ratio", r.pass(), r.ratio, r.ratio_lo);
}

void cmd_balayage(Run& run) {
    const GridSpec spec = run.cfg.grid.spec();
    const auto& b = run.cfg.balayage;
    if (run.cfg.op.kind == OperatorKind::schrodinger) {
        throw ConfigError("operator.kind", "balayage needs a divergence-form operator");
    }
    Measure mu;
    mu.density = b.include_domain ? Measure::indicator(run.cfg.build_domain()).density : ScalarField(spec);
    for (const Atom& a : b.atoms) mu.add_atom(a.position, a.mass);
    const GridSpec box = b.box_factor > 0.0 ? balayage_box(mu, b.box_factor) : spec;
    std::optional<ScalarField> lambda;
    if (run.cfg.op.kind == OperatorKind::beltrami) lambda = run.cfg.op.lambda(box);
    const BalayageResult r = partial_balayage(mu, lambda, box);
    run.note("balayage: " + std::to_string(r.iterations) + " sweeps");

    run.write("V.pgm", to_pgm(r.V));
    run.write("density.pgm", to_pgm(r.result_density, 0.0, 1.0));
    run.write("saturated.pgm", mask_to_pgm(box, r.saturated));
    run.write("trace.csv", trace_table(r.trace).str());
    const GridDomain swept = make_from_implicit(box, swept_domain_implicit(r));
    run.write("swept_boundary.csv", boundary_table(0.0, swept).str());

    const double gap = quadrature_domain_check(transfer(mu, box), r);
    const double scale = r.potential.field.max_abs();
    run.summary = {{"box", grid_json(box)},          {"sweeps", r.iterations},
                   {"input_mass", r.input_mass},     {"result_mass", r.result_mass},
                   {"swept_area", swept.area()},     {"saturated_area", r.swept_area()},
                   {"exterior_gap", gap},            {"potential_scale", scale}};
    run.check("mass conservation", r.mass_error() <= 5e-3, r.mass_error(), 5e-3);
    run.check("complementarity", r.complementarity_residual() <= 1e-6, r.complementarity_residual(), 1e-6);
    run.check("exterior potential gap", gap <= 1e-3 * scale, gap, 1e-3 * scale);
}

// Weak frames carry the exact mass by construction, so their area rate is not checked.
void growth_checks(Run& run, const GrowthState& s0, const GrowthState& s, bool weak) {
    run.check("nesting", nesting_violations(s0.D, s.D) == 0, nesting_violations(s0.D, s.D), 0);
    if (s.moment_log.size() < 3) return;
    const MomentReport m = moment_trace(s);
    run.summary["rate_min"] = m.rate_min;
    run.summary["rate_max"] = m.rate_max;
    run.summary["rate_mean"] = m.rate_mean;
    run.summary["drift"] = m.drift;
    if (s.Q <= 0.0) return;
    if (s.op.kind() == OperatorKind::schrodinger) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t k = 1; k < s.moment_log.size(); ++k) {
            lo = std::min(lo, s.moment_log[k].rate / s.Q);
            hi = std::max(hi, s.moment_log[k].rate / s.Q);
        }
        run.check("schrodinger rate positive", lo > 0.0, lo, 0.0);
        run.check("schrodinger rate at most Q", hi <= 1.0, hi, 1.0);
        return;
    }
    if (!weak) {
        const double dev = m.max_rate_deviation(s.Q);
        run.check("area rate equals Q", dev <= 0.02, dev, 0.02);
    }
    if (s.op.kind() == OperatorKind::laplace) {
        const double drift = *std::max_element(m.drift.begin() + 1, m.drift.end());
        run.check("harmonic moment drift", drift <= 0.01, drift, 0.01);
    }
}

void cmd_grow(Run& run, const std::string& mode_override) {
    const auto& rc = run.cfg.run;
    const std::string mode = mode_override.empty() ? rc.mode : mode_override;
    const GridSpec spec = run.cfg.grid.spec();
    const OperatorDesc op = run.cfg.op.build(spec);
    if (mode == "weak" && op.kind() == OperatorKind::schrodinger) {
        throw ConfigError("run.mode", "weak growth needs a divergence-form operator");
    }
    const GrowthState s0 = GrowthState::start(run.cfg.build_domain(), op, run.cfg.source.w, run.cfg.source.Q);
    CsvTable snapshots = boundary_table(0.0, s0.D);
    GrowthState s = s0;
    if (mode == "strong") {
        StrongOptions opts;
        opts.cfl = rc.cfl;
        s = grow_strong(s0, rc.t_end, opts, [&](const GrowthState& st) {
            if (st.step % rc.snapshot_stride == 0) append_boundary(snapshots, st.t, st.D);
            if (!run.quiet && st.step % 10 == 0) {
                run.log << "  step " << st.step << " t=" << st.t << " area=" << st.D.area() << '\n';
            }
        });
        if (s.step % rc.snapshot_stride != 0) append_boundary(snapshots, s.t, s.D);
    } else {
        // Every frame is swept directly from D(0); chaining short steps would
        // compound the contour reconstruction error.
        for (int f = 1; f <= rc.weak_frames; ++f) {
            const GrowthState frame = weak_step(s0, f == rc.weak_frames ? rc.t_end : rc.t_end * f / rc.weak_frames);
            MomentSample sample = frame.moment_log.back();
            const MomentSample& prev = s.moment_log.back();
            sample.step = f;
            sample.rate = (sample.area - prev.area) / (sample.t - prev.t);
            s.D = frame.D;
            s.t = frame.t;
            s.step = f;
            s.moment_log.push_back(sample);
            append_boundary(snapshots, s.t, s.D);
            if (!run.quiet) run.log << "  frame " << f << " t=" << s.t << " area=" << s.D.area() << '\n';
        }
    }
    run.write("run_log.csv", run_log_table(s).str());
    run.write("boundary.csv", snapshots.str());
    run.write("mask_initial.pgm", mask_to_pgm(spec, mask_of(s0.D)));
    run.write("mask_final.pgm", mask_to_pgm(spec, mask_of(s.D)));
    run.summary = {{"mode", mode}, {"steps", s.step}, {"t", s.t}, {"initial_area", s0.D.area()}, {"final_area", s.D.area()}};
    growth_checks(run, s0, s, mode == "weak");
    run.write("moments.json", run.summary.dump(2) + "\n");
}

// Radial solution of v'' + v'/r = u v with v(0) = 1; the area rate of the
// centred disk of radius R is Q / v(R).
double radial_schrodinger_rate(const std::function<double(double)>& u, double R) {
    const int n = 4000;
    const double r0 = 1e-6 * R, h = (R - r0) / n;
    double r = r0, v = 1.0 + 0.25 * u(0.0) * r0 * r0, dv = 0.5 * u(0.0) * r0;
    auto f = [&](double rr, double vv, double dd) { return std::pair{dd, u(rr) * vv - dd / rr}; };
    for (int i = 0; i < n; ++i) {
        const auto [a1, b1] = f(r, v, dv);
        const auto [a2, b2] = f(r + h / 2, v + h / 2 * a1, dv + h / 2 * b1);
        const auto [a3, b3] = f(r + h / 2, v + h / 2 * a2, dv + h / 2 * b2);
        const auto [a4, b4] = f(r + h, v + h * a3, dv + h * b3);
        v += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
        dv += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
        r += h;
    }
    return 1.0 / v;
}

void cmd_rates(Run& run) {
    const auto& oc = run.cfg.op;
    std::function<double(double)> u = [](double) { return 0.0; };
    std::function<double(double)> predicted;
    if (oc.kind == OperatorKind::schrodinger) {
        u = [&](double r) { return (*oc.coefficient)(r, 0.0); };
        predicted = [&](double R) { return radial_schrodinger_rate(u, R); };
    } else if (oc.kind == OperatorKind::beltrami) {
        // lambda^{-1/2} Lap(lambda^{1/2}) by central differences along the x-axis.
        const auto s = [&](double r) { return std::sqrt((*oc.coefficient)(std::abs(r), 0.0)); };
        u = [s](double r) {
            const double d = 1e-4;
            const double lap = (s(r + d) - 2 * s(r) + s(r - d)) / (d * d) +
                               (r > d ? (s(r + d) - s(r - d)) / (2 * d * r) : (s(r + d) - 2 * s(r) + s(r - d)) / (d * d));
            return lap / s(r);
        };
        predicted = [&](double R) { return radial_area_rate([&](double r) { return (*oc.coefficient)(r, 0.0); }, R); };
    } else {
        predicted = [](double) { return 1.0; };
    }
    CsvTable table({"R", "predicted", "measured", "relative_error"});
    for (double R : run.cfg.rates.radii) {
        const double p = predicted(R), m = measured_radial_rate(u, R, run.cfg.grid.nx);
        const double rel = std::abs(m - p) / p;
        table.row(std::vector<double>{R, p, m, rel});
        run.check("radial rate at R=" + CsvTable::number(R), rel <= 0.02, rel, 0.02);
    }
    run.write("rates.csv", table.str());

    const Expression* ue = oc.kind == OperatorKind::schrodinger ? &*oc.coefficient : nullptr;
    const std::function<double(Point)> u2 = [&](Point p) { return ue ? (*ue)(p) : u(norm(p)); };
    const auto& radii = run.cfg.rates.probe_radii;
    const std::vector<double> probe = initial_rate_probe(u2, run.cfg.source.w, radii, run.cfg.grid.nx);
    CsvTable pt({"radius", "rate"});
    std::vector<std::pair<double, double>> sorted;
    for (std::size_t k = 0; k < probe.size(); ++k) {
        pt.row(std::vector<double>{radii[k], probe[k]});
        sorted.emplace_back(radii[k], probe[k]);
    }
    run.write("initial_rates.csv", pt.str());
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a.first > b.first; });
    double worst = 0.0;
    for (std::size_t k = 1; k < sorted.size(); ++k) worst = std::max(worst, sorted[k - 1].second - sorted[k].second);
    run.check("initial rate rises as the disk shrinks", worst <= 1e-3, worst, 1e-3);
    const double top = std::max_element(sorted.begin(), sorted.end(), [](auto a, auto b) { return a.second < b.second; })->second;
    run.check("initial rate at most 1", top <= 1.0 + 1e-3, top, 1.0 + 1e-3);
}

void cmd_dtn(Run& run) {
    if (run.cfg.op.kind == OperatorKind::schrodinger) {
        throw ConfigError("operator.kind", "dtn takes laplace or beltrami");
    }
    const GridSpec spec = run.cfg.grid.spec();
    const DtNMatrix m = dtn_matrix(run.cfg.op.lambda(spec), run.cfg.build_domain(), run.cfg.dtn_order);
    run.write("dtn_matrix.csv", m.to_csv());
    run.summary = {{"order", run.cfg.dtn_order}, {"symmetry_defect", m.symmetry_defect()}, {"labels", m.labels}};
    run.check("symmetry defect", m.symmetry_defect() <= 0.02, m.symmetry_defect(), 0.02);
}

void cmd_reproduce(Run& run, int n, const std::vector<int>& only) {
    CsvTable table({"id", "name", "pass", "seconds", "detail"});
    json all = json::array();
    run_acceptance(n, only, [&](const CriterionResult& r) {
        if (!run.quiet) {
            run.log << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.name << " (" << r.seconds << " s) " << r.detail << '\n';
        }
        table.row({std::to_string(r.id), r.name, r.pass ? "true" : "false", CsvTable::number(r.seconds), r.detail});
        all.push_back(json::parse(r.to_json()));
        run.checks.push_back({{"name", "criterion " + std::to_string(r.id) + ": " + r.name}, {"pass", r.pass}});
    });
    run.write("acceptance.csv", table.str());
    run.write("acceptance.json", all.dump(2) + "\n");
}

struct Flags {
    std::string config;
    std::string out;
    int grid_n = 0;
    bool quiet = false;
    bool seedless = false;
    std::string grow_mode;
    std::vector<int> only;
};

int execute(const std::string& command, const Flags& flags, std::ostream& out, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig cfg;
    try {
        if (command == "reproduce") {
            if (!flags.config.empty()) throw ConfigError("--config", "reproduce takes no config");
            cfg = default_scenario(command);
        } else {
            cfg = flags.config.empty() ? default_scenario(command) : load_scenario(flags.config, command);
        }
        if (flags.grid_n > 0) cfg.grid.resample(flags.grid_n);
        if (command != "reproduce" && command != "rates" && command != "balayage") (void)cfg.build_domain();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    }

    Run run(cfg, flags.out.empty() ? fs::path(cfg.output) : fs::path(flags.out), flags.quiet, out);
    json manifest = {{"tool", "egrowth"},
                     {"version", EGROWTH_VERSION},
                     {"compiler", __VERSION__},
                     {"command", command},
                     {"config_path", flags.config},
                     {"inputs", cfg.echo},
                     {"grid", grid_json(cfg.grid.spec())},
                     {"grid_n_override", flags.grid_n > 0 ? json(flags.grid_n) : json(nullptr)},
                     {"deterministic", true}};
    int code = exit_ok;
    try {
        if (command == "green") cmd_green(run);
        else if (command == "dirichlet") cmd_dirichlet(run);
        else if (command == "perturb") cmd_perturb(run);
        else if (command == "balayage") cmd_balayage(run);
        else if (command == "grow") cmd_grow(run, flags.grow_mode);
        else if (command == "rates") cmd_rates(run);
        else if (command == "dtn") cmd_dtn(run);
        else cmd_reproduce(run, flags.grid_n > 0 ? flags.grid_n : 256, flags.only);
        code = run.all_pass() ? exit_ok : exit_check;
        manifest["status"] = code == exit_ok ? "ok" : "check_failed";
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        err << "solver error (" << to_string(e.code()) << "): " << e.what() << '\n';
        code = exit_solver;
        manifest["status"] = "solver_failure";
        manifest["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    }
    manifest["summary"] = run.summary;
    manifest["checks"] = run.checks;
    manifest["artifacts"] = run.artifacts;
    manifest["exit_code"] = code;
    manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        write_text(run.out / "manifest.json", manifest.dump(2) + "\n");
    } catch (const Error& e) {
        err << "cannot write manifest: " << e.what() << '\n';
        return code == exit_ok ? exit_solver : code;
    }
    if (!flags.quiet) out << "wrote " << (run.out / "manifest.json").string() << '\n';
    return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Elliptic growth, balayage and Green-function experiments", "egrowth"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", EGROWTH_VERSION);
    Flags flags;
    app.add_option("--config", flags.config, "scenario JSON file");
    app.add_option("--out", flags.out, "output directory (overrides the config)");
    app.add_option("--grid-n", flags.grid_n, "nodes along x, keeping the grid's bounding box")->check(CLI::Range(16, 4096));
    app.add_flag("--quiet", flags.quiet, "no progress output");
    app.add_flag("--seedless", flags.seedless, "accepted for scripts; every algorithm here is deterministic");

    const std::map<std::string, std::string> help = {
        {"green", "Green function of a domain and operator"},
        {"dirichlet", "Dirichlet problem with expression data"},
        {"perturb", "first-order variation against direct re-solves"},
        {"balayage", "partial balayage of atoms and densities"},
        {"grow", "strong (level-set) or weak (balayage) growth"},
        {"rates", "radial area rates and initial-rate probes"},
        {"dtn", "Dirichlet-to-Neumann matrix on Fourier modes"},
        {"reproduce", "run the full acceptance table"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, text] : help) subs[name] = app.add_subcommand(name, text);
    subs["grow"]->add_option("mode", flags.grow_mode, "strong or weak (overrides run.mode)")->check(CLI::IsMember({"strong", "weak"}));
    subs["reproduce"]->add_option("--only", flags.only, "criteria to run")->check(CLI::Range(1, acceptance_criteria));

    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) return execute(name, flags, out, err);
    }
    return exit_config;
}

}  // namespace egrowth::cli
