#include "scenario.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "egrowth/error.hpp"

namespace egrowth::cli {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// Typed access to one JSON object; remembers which keys were read so that
/// finish() can reject the rest.
class Section {
public:
    Section(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError(path_, "expected an object");
    }

    const std::string& path() const { return path_; }
    bool has(const std::string& key) const { return j_->contains(key); }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_->find(key);
        return it == j_->end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number()) fail(key, "expected a number");
        const double d = v->get<double>();
        if (!std::isfinite(d)) fail(key, "must be finite");
        return d;
    }

    int integer(const std::string& key, int fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) fail(key, "expected an integer");
        return v->get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(key, "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(key, "expected a string");
        return v->get<std::string>();
    }

    std::string choice(const std::string& key, const std::string& fallback, std::initializer_list<const char*> options) {
        const std::string s = string(key, fallback);
        std::string listed;
        for (const char* o : options) {
            if (s == o) return s;
            listed += listed.empty() ? o : std::string(", ") + o;
        }
        fail(key, "'" + s + "' is not one of " + listed);
    }

    static Point to_point(const json& v, const std::string& where) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ConfigError(where, "expected [x, y]");
        }
        return {v[0].get<double>(), v[1].get<double>()};
    }

    Point point(const std::string& key, Point fallback) {
        const json* v = find(key);
        return v ? to_point(*v, join(path_, key)) : fallback;
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_array() || v->empty()) fail(key, "expected a non-empty array of numbers");
        std::vector<double> out;
        for (const auto& e : *v) {
            if (!e.is_number()) fail(key, "expected a non-empty array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::optional<Expression> expression(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (v->is_number()) return Expression::constant(v->get<double>());
        if (!v->is_string()) fail(key, "expected an expression string or a number");
        try {
            return Expression::parse(v->get<std::string>());
        } catch (const ExpressionError& e) {
            fail(key, e.what());
        }
    }

    std::optional<Section> child(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        return Section(*v, join(path_, key));
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError(join(path_, key), what);
    }

    void finish() const {
        for (const auto& [key, value] : j_->items()) {
            if (!seen_.count(key)) throw ConfigError(join(path_, key), "unknown key");
        }
    }

private:
    const json* j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& where, const std::string& what) {
    if (!ok) throw ConfigError(where, what);
}

GridConfig read_grid(Section s) {
    GridConfig g;
    const bool square = s.has("lo") || s.has("hi") || s.has("n");
    const bool explicit_ = s.has("origin") || s.has("h") || s.has("nx") || s.has("ny");
    require(!(square && explicit_), s.path(), "use either lo/hi/n or origin/h/nx/ny");
    if (square) {
        const double lo = s.number("lo", -2.0), hi = s.number("hi", 2.0);
        const int n = s.integer("n", 256);
        require(hi > lo, join(s.path(), "hi"), "must exceed lo");
        require(n >= 16 && n <= 4096, join(s.path(), "n"), "must lie in [16, 4096]");
        g.origin = {lo, lo};
        g.h = (hi - lo) / (n - 1);
        g.nx = g.ny = n;
    } else {
        g.origin = s.point("origin", g.origin);
        g.h = s.number("h", g.h);
        g.nx = s.integer("nx", g.nx);
        g.ny = s.integer("ny", g.ny);
        require(g.h > 0.0, join(s.path(), "h"), "must be positive");
        require(g.nx >= 16 && g.nx <= 4096, join(s.path(), "nx"), "must lie in [16, 4096]");
        require(g.ny >= 16 && g.ny <= 4096, join(s.path(), "ny"), "must lie in [16, 4096]");
    }
    s.finish();
    return g;
}

DomainConfig read_domain(Section s) {
    DomainConfig d;
    d.shape = s.choice("shape", d.shape, {"disk", "ellipse", "star"});
    d.center = s.point("center", d.center);
    if (d.shape == "ellipse") {
        d.a = s.number("a", d.a);
        d.b = s.number("b", d.b);
        require(d.a > 0.0, join(s.path(), "a"), "must be positive");
        require(d.b > 0.0, join(s.path(), "b"), "must be positive");
    } else {
        d.radius = s.number("radius", d.radius);
        require(d.radius > 0.0, join(s.path(), "radius"), "must be positive");
    }
    if (d.shape == "star") {
        d.amplitude = s.number("amplitude", 0.1);
        d.mode = s.integer("mode", d.mode);
        require(std::abs(d.amplitude) < 1.0, join(s.path(), "amplitude"), "must lie in (-1, 1)");
        require(d.mode >= 1 && d.mode <= 32, join(s.path(), "mode"), "must lie in [1, 32]");
    }
    s.finish();
    return d;
}

OperatorConfig read_operator(Section s) {
    OperatorConfig op;
    const std::string kind = s.choice("kind", "laplace", {"laplace", "beltrami", "schrodinger"});
    if (kind == "beltrami") {
        op.kind = OperatorKind::beltrami;
        op.coefficient = s.expression("lambda");
        require(op.coefficient.has_value(), join(s.path(), "lambda"), "required for kind 'beltrami'");
    } else if (kind == "schrodinger") {
        op.kind = OperatorKind::schrodinger;
        op.coefficient = s.expression("potential");
        require(op.coefficient.has_value(), join(s.path(), "potential"), "required for kind 'schrodinger'");
    }
    s.finish();
    return op;
}

const std::set<std::string>& command_sections(const std::string& command) {
    static const std::map<std::string, std::set<std::string>> sections = {
        {"green", {"probes"}},     {"dirichlet", {"boundary_data"}}, {"perturb", {"perturb"}},
        {"balayage", {"balayage"}}, {"grow", {"run"}},                {"rates", {"rates"}},
        {"dtn", {"dtn"}},
    };
    static const std::set<std::string> none;
    const auto it = sections.find(command);
    return it == sections.end() ? none : it->second;
}

std::string location(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

void GridConfig::resample(int n) {
    const double wx = h * (nx - 1), wy = h * (ny - 1);
    h = wx / (n - 1);
    nx = n;
    ny = static_cast<int>(std::lround(wy / h)) + 1;
}

GridDomain DomainConfig::build(const GridSpec& spec) const {
    const double reach = shape == "ellipse" ? std::max(a, b) : radius * (1.0 + std::abs(amplitude));
    if (!spec.contains(center, reach + 4.0 * spec.h)) {
        throw ConfigError("domain", "shape does not fit inside the grid with a 4-cell margin");
    }
    if (shape == "ellipse") return make_ellipse(center, a, b, spec);
    if (shape == "star") {
        const double r = radius, amp = amplitude;
        const int m = mode;
        return make_star(center, [=](double t) { return r * (1.0 + amp * std::cos(m * t)); }, spec);
    }
    return make_disk(center, radius, spec);
}

OperatorDesc OperatorConfig::build(const GridSpec& spec) const {
    if (kind == OperatorKind::laplace) return OperatorDesc::laplace();
    const ScalarField c = ScalarField::sample(spec, *coefficient);
    const char* field = kind == OperatorKind::beltrami ? "operator.lambda" : "operator.potential";
    if (!c.all_finite()) throw ConfigError(field, "expression is not finite on the grid");
    const auto v = c.values();
    const double lo = *std::min_element(v.begin(), v.end());
    if (kind == OperatorKind::beltrami) {
        if (lo <= OperatorDesc::lambda_floor) throw ConfigError(field, "lambda must be positive on the grid");
        return OperatorDesc::beltrami(c);
    }
    if (lo < 0.0) throw ConfigError(field, "potential must be nonnegative on the grid");
    return OperatorDesc::schrodinger(c);
}

ScalarField OperatorConfig::lambda(const GridSpec& spec) const {
    if (kind != OperatorKind::beltrami) return ScalarField(spec, 1.0);
    return build(spec).coefficient();
}

GridDomain ScenarioConfig::build_domain() const { return domain.build(grid.spec()); }

ScenarioConfig default_scenario(const std::string& command) {
    ScenarioConfig c;
    c.command = command;
    c.output = "out/" + command;
    if (command == "dirichlet") c.boundary_data = Expression::parse("x*x - y*y");
    if (command == "balayage") c.balayage.atoms.push_back({{0.0, 0.0}, std::acos(-1.0) / 4.0});
    if (command == "rates") {
        c.op.kind = OperatorKind::schrodinger;
        c.op.coefficient = Expression::constant(1.0);
    }
    c.echo = nlohmann::json::object();
    return c;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& command) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        const auto cut = msg.find("syntax error");
        throw ConfigError(location(text, e.byte > 0 ? e.byte - 1 : 0), cut == std::string::npos ? msg : msg.substr(cut));
    }
    ScenarioConfig c = default_scenario(command);
    c.echo = j;
    Section root(j, "");

    const std::string declared = root.string("command", command);
    require(declared == command, "command", "config is for '" + declared + "', not '" + command + "'");
    c.output = root.string("output", c.output);
    require(!c.output.empty(), "output", "must not be empty");
    if (auto s = root.child("grid")) c.grid = read_grid(*s);
    if (auto s = root.child("domain")) c.domain = read_domain(*s);
    if (auto s = root.child("operator")) c.op = read_operator(*s);
    if (auto s = root.child("source")) {
        c.source.w = s->point("w", c.source.w);
        c.source.Q = s->number("Q", c.source.Q);
        require(c.source.Q >= 0.0, "source.Q", "must be nonnegative");
        s->finish();
    }

    const auto& allowed = command_sections(command);
    for (const char* key : {"probes", "boundary_data", "perturb", "balayage", "run", "rates", "dtn"}) {
        if (root.has(key) && !allowed.count(key)) throw ConfigError(key, "not used by '" + command + "'");
    }
    if (const json* p = root.find("probes")) {
        require(p->is_array(), "probes", "expected an array of [x, y]");
        for (std::size_t i = 0; i < p->size(); ++i) c.probes.push_back(Section::to_point((*p)[i], "probes[" + std::to_string(i) + "]"));
    }
    if (auto e = root.expression("boundary_data")) c.boundary_data = e;
    if (auto s = root.child("perturb")) {
        auto& p = c.perturb;
        p.kind = s->choice("kind", p.kind, {"hadamard", "schrodinger_series", "beltrami", "normal_schrodinger", "normal_beltrami"});
        p.eps = s->number("eps", p.eps);
        require(p.eps > 0.0 && p.eps <= 0.5, "perturb.eps", "must lie in (0, 0.5]");
        p.z = s->point("z", p.z);
        if (auto f = s->expression("field")) p.field = *f;
        p.formula = s->choice("formula", p.formula, {"gradient", "laplacian"});
        s->finish();
    }
    if (auto s = root.child("balayage")) {
        auto& b = c.balayage;
        if (const json* atoms = s->find("atoms")) {
            b.atoms.clear();
            require(atoms->is_array(), "balayage.atoms", "expected an array");
            for (std::size_t i = 0; i < atoms->size(); ++i) {
                Section a((*atoms)[i], "balayage.atoms[" + std::to_string(i) + "]");
                const Point w = a.point("w", {0.0, 0.0});
                const double m = a.number("mass", 0.0);
                require(m > 0.0, join(a.path(), "mass"), "must be positive");
                a.finish();
                b.atoms.push_back({w, m});
            }
        }
        b.include_domain = s->boolean("include_domain", b.include_domain);
        b.box_factor = s->number("box_factor", b.box_factor);
        require(b.box_factor == 0.0 || b.box_factor >= 1.5, "balayage.box_factor", "must be 0 (use the grid) or >= 1.5");
        require(b.include_domain || !b.atoms.empty(), "balayage", "needs atoms or include_domain");
        s->finish();
    }
    if (auto s = root.child("run")) {
        auto& r = c.run;
        r.mode = s->choice("mode", r.mode, {"strong", "weak"});
        r.t_end = s->number("t_end", r.t_end);
        r.cfl = s->number("cfl", r.cfl);
        r.snapshot_stride = s->integer("snapshot_stride", r.snapshot_stride);
        r.weak_frames = s->integer("weak_frames", r.weak_frames);
        require(r.t_end > 0.0, "run.t_end", "must be positive");
        require(r.cfl > 0.0 && r.cfl <= 1.0, "run.cfl", "must lie in (0, 1]");
        require(r.snapshot_stride >= 1, "run.snapshot_stride", "must be at least 1");
        require(r.weak_frames >= 1 && r.weak_frames <= 1000, "run.weak_frames", "must lie in [1, 1000]");
        s->finish();
    }
    if (auto s = root.child("rates")) {
        c.rates.radii = s->numbers("radii", c.rates.radii);
        c.rates.probe_radii = s->numbers("probe_radii", c.rates.probe_radii);
        for (double r : c.rates.radii) require(r > 0.0 && r <= 3.0, "rates.radii", "entries must lie in (0, 3]");
        for (double r : c.rates.probe_radii) require(r > 0.0 && r <= 3.0, "rates.probe_radii", "entries must lie in (0, 3]");
        s->finish();
    }
    if (auto s = root.child("dtn")) {
        c.dtn_order = s->integer("order", c.dtn_order);
        require(c.dtn_order >= 1 && c.dtn_order <= 6, "dtn.order", "must lie in [1, 6]");
        s->finish();
    }
    root.finish();
    return c;
}

ScenarioConfig load_scenario(const std::string& path, const std::string& command) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path, "cannot open config");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_scenario(text.str(), command);
    } catch (const ConfigError& e) {
        throw ConfigError(path + (e.where().empty() ? "" : ": " + e.where()),
                          std::string(e.what()).substr(e.where().empty() ? 0 : e.where().size() + 2));
    }
}

}  // namespace egrowth::cli
