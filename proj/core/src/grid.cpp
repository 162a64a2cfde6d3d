#include "egrowth/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace egrowth {

// ---- GridSpec ---------------------------------------------------------------

GridSpec::GridSpec(Point origin_, double h_, int nx_, int ny_)
    : origin(origin_), h(h_), nx(nx_), ny(ny_) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw Error(ErrorCode::invalid_argument, "grid spacing must be positive");
    }
    if (nx < 8 || ny < 8) {
        throw Error(ErrorCode::invalid_argument, "grid needs at least 8 nodes per axis");
    }
}

GridSpec GridSpec::square(double lo, double hi, int n) {
    if (!(hi > lo)) throw Error(ErrorCode::invalid_argument, "square grid needs hi > lo");
    if (n < 8) throw Error(ErrorCode::invalid_argument, "grid needs at least 8 nodes per axis");
    return GridSpec({lo, lo}, (hi - lo) / (n - 1), n, n);
}

bool GridSpec::contains(Point p, double margin) const {
    const Point hi = upper();
    return p.x >= origin.x + margin && p.x <= hi.x - margin && p.y >= origin.y + margin &&
           p.y <= hi.y - margin;
}

bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.nx == b.nx && a.ny == b.ny && a.origin == b.origin && a.h == b.h;
}

// ---- ScalarField ------------------------------------------------------------

ScalarField::ScalarField(const GridSpec& spec, double fill) : spec_(spec), values_(spec.size(), fill) {}

ScalarField::ScalarField(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.size()) {
        throw Error(ErrorCode::spec_mismatch, "value count does not match grid");
    }
}

ScalarField ScalarField::sample(const GridSpec& spec, const std::function<double(Point)>& fn) {
    ScalarField f(spec);
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) f.at(i, j) = fn(spec.node(i, j));
    }
    return f;
}

double ScalarField::bilinear(Point p) const {
    const double gx = (p.x - spec_.origin.x) / spec_.h;
    const double gy = (p.y - spec_.origin.y) / spec_.h;
    int i = std::clamp(static_cast<int>(std::floor(gx)), 0, spec_.nx - 2);
    int j = std::clamp(static_cast<int>(std::floor(gy)), 0, spec_.ny - 2);
    const double s = gx - i;
    const double t = gy - j;
    return (1 - s) * (1 - t) * at(i, j) + s * (1 - t) * at(i + 1, j) + (1 - s) * t * at(i, j + 1) +
           s * t * at(i + 1, j + 1);
}

namespace {

void cubic_weights(double s, double w[4]) {
    w[0] = -s * (s - 1) * (s - 2) / 6.0;
    w[1] = (s + 1) * (s - 1) * (s - 2) / 2.0;
    w[2] = -(s + 1) * s * (s - 2) / 2.0;
    w[3] = (s + 1) * s * (s - 1) / 6.0;
}

}  // namespace

double ScalarField::bicubic(Point p) const {
    const double gx = (p.x - spec_.origin.x) / spec_.h;
    const double gy = (p.y - spec_.origin.y) / spec_.h;
    const int i = std::clamp(static_cast<int>(std::floor(gx)), 1, spec_.nx - 3);
    const int j = std::clamp(static_cast<int>(std::floor(gy)), 1, spec_.ny - 3);
    double wx[4], wy[4];
    cubic_weights(gx - i, wx);
    cubic_weights(gy - j, wy);
    double sum = 0.0;
    for (int b = 0; b < 4; ++b) {
        double row = 0.0;
        for (int a = 0; a < 4; ++a) row += wx[a] * at(i - 1 + a, j - 1 + b);
        sum += wy[b] * row;
    }
    return sum;
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {
void require_same(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) throw Error(ErrorCode::spec_mismatch, "fields live on different grids");
}
}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same(spec_, o.spec_);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same(spec_, o.spec_);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
    require_same(spec_, o.spec_);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * o.values_[k];
    return *this;
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    require_same(a.spec_, b.spec_);
    ScalarField out(a.spec_);
    for (std::size_t k = 0; k < a.values_.size(); ++k) out.values_[k] = a.values_[k] * b.values_[k];
    return out;
}

// ---- BoundaryProfile --------------------------------------------------------

BoundaryProfile::BoundaryProfile(const GridDomain& domain,
                                 const std::function<double(const BoundaryNode&)>& fn) {
    values_.reserve(domain.boundary().size());
    for (const auto& node : domain.boundary()) values_.push_back(fn(node));
}

double BoundaryProfile::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

// ---- contour extraction -----------------------------------------------------

namespace {

struct Contour {
    struct Crossing {
        Point position;
        std::size_t inside;
        std::size_t outside;
        double theta;
    };
    std::vector<Crossing> crossings;
    std::vector<int> next;  // directed segment crossing -> next crossing
    std::vector<std::size_t> cell_of_segment;  // grid index of the cell's lower-left node
};

// Marching squares on {v < 0}; segments are oriented with the inside on the left.
Contour extract_contour(const GridSpec& spec, std::span<const double> v) {
    Contour c;
    std::vector<int> edge_id(2 * spec.size(), -1);
    auto crossing_on = [&](std::size_t p, std::size_t q, std::size_t eid) -> int {
        int& slot = edge_id[eid];
        if (slot >= 0) return slot;
        const bool p_in = v[p] < 0.0;
        const std::size_t in = p_in ? p : q;
        const std::size_t out = p_in ? q : p;
        const double theta = v[in] / (v[in] - v[out]);
        const Point a = spec.node(in);
        const Point b = spec.node(out);
        c.crossings.push_back({a + theta * (b - a), in, out, theta});
        c.next.push_back(-1);
        slot = static_cast<int>(c.crossings.size() - 1);
        return slot;
    };
    for (int j = 0; j + 1 < spec.ny; ++j) {
        for (int i = 0; i + 1 < spec.nx; ++i) {
            const std::size_t corner[4] = {spec.index(i, j), spec.index(i + 1, j), spec.index(i + 1, j + 1),
                                           spec.index(i, j + 1)};
            bool in[4];
            int count = 0;
            for (int q = 0; q < 4; ++q) {
                in[q] = v[corner[q]] < 0.0;
                count += in[q] ? 1 : 0;
            }
            if (count == 0 || count == 4) continue;
            // Edge ids: bottom H(i,j), right V(i+1,j), top H(i,j+1), left V(i,j).
            const std::size_t eids[4] = {2 * corner[0], 2 * corner[1] + 1, 2 * corner[3], 2 * corner[0] + 1};
            int exits[2], entries[2];
            int ne = 0, nn = 0;
            int xing[4] = {-1, -1, -1, -1};
            for (int e = 0; e < 4; ++e) {
                const int a = e;
                const int b = (e + 1) % 4;
                if (in[a] == in[b]) continue;
                xing[e] = crossing_on(corner[a], corner[b], eids[e]);
                if (in[a]) exits[ne++] = e;
                else entries[nn++] = e;
            }
            auto link = [&](int from_edge, int to_edge) {
                c.next[static_cast<std::size_t>(xing[from_edge])] = xing[to_edge];
                c.cell_of_segment.push_back(corner[0]);
            };
            if (ne == 1) {
                link(exits[0], entries[0]);
            } else {
                const double centre = 0.25 * (v[corner[0]] + v[corner[1]] + v[corner[2]] + v[corner[3]]);
                for (int k = 0; k < 2; ++k) {
                    const int ex = exits[k];
                    // Inside centre joins each exit to the following entry; otherwise to the preceding one.
                    const int target = centre < 0.0 ? (ex + 1) % 4 : (ex + 3) % 4;
                    link(ex, target);
                }
            }
        }
    }
    return c;
}

double segment_distance(Point p, Point a, Point b, double* t_out) {
    const Point d = b - a;
    const double len2 = dot(d, d);
    double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    if (t_out) *t_out = t;
    return distance(p, a + t * d);
}

struct ClosestSegments {
    std::vector<double> dist;
    std::vector<int> segment;  // index into the crossing list: segment (s -> next[s])
};

// Closest-point transform by Dijkstra propagation of candidate segments.
ClosestSegments closest_segments(const GridSpec& spec, const Contour& c) {
    ClosestSegments out;
    out.dist.assign(spec.size(), std::numeric_limits<double>::infinity());
    out.segment.assign(spec.size(), -1);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;

    auto offer = [&](std::size_t k, int s) {
        const Point a = c.crossings[static_cast<std::size_t>(s)].position;
        const Point b = c.crossings[static_cast<std::size_t>(c.next[static_cast<std::size_t>(s)])].position;
        const double d = segment_distance(spec.node(k), a, b, nullptr);
        if (d < out.dist[k]) {
            out.dist[k] = d;
            out.segment[k] = s;
            queue.push({d, k});
        }
    };

    // Seed from every segment: corners of its cell and their direct neighbours.
    for (std::size_t s = 0; s < c.next.size(); ++s) {
        if (c.next[s] < 0) continue;
        const std::size_t in = c.crossings[s].inside;
        const int i0 = spec.i_of(in);
        const int j0 = spec.j_of(in);
        for (int dj = -2; dj <= 2; ++dj) {
            for (int di = -2; di <= 2; ++di) {
                const int i = i0 + di, j = j0 + dj;
                if (i < 0 || j < 0 || i >= spec.nx || j >= spec.ny) continue;
                offer(spec.index(i, j), static_cast<int>(s));
            }
        }
    }
    while (!queue.empty()) {
        const auto [d, k] = queue.top();
        queue.pop();
        if (d > out.dist[k]) continue;
        const int i0 = spec.i_of(k);
        const int j0 = spec.j_of(k);
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                if (di == 0 && dj == 0) continue;
                const int i = i0 + di, j = j0 + dj;
                if (i < 0 || j < 0 || i >= spec.nx || j >= spec.ny) continue;
                offer(spec.index(i, j), out.segment[k]);
            }
        }
    }
    return out;
}

Point central_gradient(const GridSpec& spec, std::span<const double> phi, std::size_t k) {
    const int i = spec.i_of(k);
    const int j = spec.j_of(k);
    const int ip = std::min(i + 1, spec.nx - 1), im = std::max(i - 1, 0);
    const int jp = std::min(j + 1, spec.ny - 1), jm = std::max(j - 1, 0);
    return {(phi[spec.index(ip, j)] - phi[spec.index(im, j)]) / ((ip - im) * spec.h),
            (phi[spec.index(i, jp)] - phi[spec.index(i, jm)]) / ((jp - jm) * spec.h)};
}

// Part of the node's dual cell (side h, centred on the node) where the
// linearized level set is negative. Returns the fraction and the centroid
// offset in cell units.
double cut_fraction(const GridSpec& spec, std::span<const double> phi, std::size_t k, Point* offset) {
    *offset = {};
    const double d = phi[k] / spec.h;
    if (d <= -1.0) return 1.0;
    if (d >= 1.0) return 0.0;
    const Point g = central_gradient(spec, phi, k);
    const double len = norm(g);
    if (!(len > 1e-8)) return std::clamp(0.5 - d, 0.0, 1.0);
    const Point n = g / len;
    const double dd = d / len;
    const Point square[4] = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
    Point poly[8];
    int m = 0;
    for (int i = 0; i < 4; ++i) {
        const Point a = square[i];
        const Point b = square[(i + 1) % 4];
        const double fa = dot(n, a) + dd;
        const double fb = dot(n, b) + dd;
        if (fa < 0.0) poly[m++] = a;
        if ((fa < 0.0) != (fb < 0.0)) poly[m++] = a + (fa / (fa - fb)) * (b - a);
    }
    double area = 0.0;
    Point c;
    for (int i = 0; i < m; ++i) {
        const Point a = poly[i];
        const Point b = poly[(i + 1) % m];
        const double w = cross(a, b);
        area += w;
        c += w * (a + b);
    }
    area *= 0.5;
    if (area > 1e-14) *offset = c / (6.0 * area);
    return std::clamp(area, 0.0, 1.0);
}

}  // namespace

std::vector<double> reinitialize(const GridSpec& spec, std::span<const double> implicit) {
    if (implicit.size() != spec.size()) throw Error(ErrorCode::spec_mismatch, "implicit field size");
    const Contour c = extract_contour(spec, implicit);
    if (c.crossings.empty()) throw Error(ErrorCode::invalid_argument, "level set has no zero contour");
    const ClosestSegments cs = closest_segments(spec, c);
    std::vector<double> phi(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
        phi[k] = implicit[k] < 0.0 ? -cs.dist[k] : cs.dist[k];
        // A node exactly on the polyline keeps its side.
        if (implicit[k] < 0.0 && phi[k] == 0.0) phi[k] = -1e-14 * spec.h;
    }
    return phi;
}

// ---- GridDomain -------------------------------------------------------------

GridDomain GridDomain::from_phi(const GridSpec& spec, std::vector<double> phi) {
    if (phi.size() != spec.size()) throw Error(ErrorCode::spec_mismatch, "phi size does not match grid");
    auto data = std::make_shared<Data>();
    data->spec = spec;
    data->mask.assign(spec.size(), 0);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (!std::isfinite(phi[k])) throw Error(ErrorCode::invalid_argument, "phi must be finite");
        if (phi[k] < 0.0) {
            data->mask[k] = 1;
            ++data->interior_count;
        }
    }
    if (data->interior_count == 0) throw Error(ErrorCode::invalid_argument, "domain has no interior nodes");
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            const bool ring = i < 2 || j < 2 || i >= spec.nx - 2 || j >= spec.ny - 2;
            if (ring && data->mask[spec.index(i, j)]) {
                throw Error(ErrorCode::out_of_bounds, "domain reaches the two outermost node rings");
            }
        }
    }

    const Contour c = extract_contour(spec, phi);
    // Walk closed loops.
    std::vector<int> order_of(c.crossings.size(), -1);
    std::vector<std::size_t> order;
    std::vector<int> loop_of;
    int loop = 0;
    for (std::size_t s = 0; s < c.crossings.size(); ++s) {
        if (order_of[s] >= 0) continue;
        std::size_t cur = s;
        while (order_of[cur] < 0) {
            order_of[cur] = static_cast<int>(order.size());
            order.push_back(cur);
            loop_of.push_back(loop);
            if (c.next[cur] < 0) throw Error(ErrorCode::out_of_bounds, "open contour: domain touches the grid edge");
            cur = static_cast<std::size_t>(c.next[cur]);
        }
        ++loop;
    }

    data->boundary.resize(order.size());
    data->crossing.assign(4 * spec.size(), -1);
    for (std::size_t b = 0; b < order.size(); ++b) {
        const auto& x = c.crossings[order[b]];
        BoundaryNode& node = data->boundary[b];
        node.position = x.position;
        node.inside = x.inside;
        node.outside = x.outside;
        node.theta = x.theta;
        node.loop = loop_of[b];
        const Point ga = central_gradient(spec, phi, x.inside);
        const Point gb = central_gradient(spec, phi, x.outside);
        node.normal = (1.0 - x.theta) * ga + x.theta * gb;
        const std::ptrdiff_t diff = static_cast<std::ptrdiff_t>(x.outside) - static_cast<std::ptrdiff_t>(x.inside);
        const int dir = diff == 1 ? 0 : diff == -1 ? 1 : diff > 0 ? 2 : 3;
        data->crossing[4 * x.inside + static_cast<std::size_t>(dir)] = static_cast<int>(b);
    }
    // Segments in loop order and arclength weights.
    for (std::size_t b = 0; b < order.size(); ++b) {
        const std::size_t nb = static_cast<std::size_t>(order_of[static_cast<std::size_t>(c.next[order[b]])]);
        data->segments.emplace_back(b, nb);
    }
    std::vector<std::size_t> prev(order.size());
    for (const auto& [a, b] : data->segments) prev[b] = a;
    for (std::size_t b = 0; b < order.size(); ++b) {
        const std::size_t nb = data->segments[b].second;
        BoundaryNode& node = data->boundary[b];
        node.ds = 0.5 * (distance(node.position, data->boundary[nb].position) +
                         distance(node.position, data->boundary[prev[b]].position));
        double len = norm(node.normal);
        if (!(len > 1e-12)) {
            const Point t = data->boundary[nb].position - data->boundary[prev[b]].position;
            node.normal = {t.y, -t.x};
            len = norm(node.normal);
        }
        node.normal = node.normal / len;
    }

    // Closest-point band.
    const ClosestSegments cs = closest_segments(spec, c);
    const double band = band_cells * spec.h;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (cs.segment[k] < 0 || cs.dist[k] > band) continue;
        const std::size_t s = static_cast<std::size_t>(cs.segment[k]);
        BandEntry e;
        e.node = k;
        e.a = static_cast<std::size_t>(order_of[s]);
        e.b = data->segments[e.a].second;
        const Point pa = data->boundary[e.a].position;
        const Point pb = data->boundary[e.b].position;
        const double d = segment_distance(spec.node(k), pa, pb, &e.t);
        e.closest = pa + e.t * (pb - pa);
        e.distance = data->mask[k] ? -d : d;
        data->band.push_back(e);
    }

    data->weight.assign(spec.size(), 0.0);
    data->offset.assign(spec.size(), Point{});
    for (std::size_t k = 0; k < spec.size(); ++k) {
        data->weight[k] = cut_fraction(spec, phi, k, &data->offset[k]);
    }

    data->phi = std::move(phi);
    GridDomain out;
    out.data_ = std::move(data);
    return out;
}

Point GridDomain::cell_centroid(std::size_t k) const {
    return data_->spec.node(k) + data_->spec.h * data_->offset[k];
}

double GridDomain::area() const {
    double a = 0.0;
    for (std::size_t k = 0; k < data_->phi.size(); ++k) a += weight(k);
    return a * data_->spec.h * data_->spec.h;
}

double GridDomain::perimeter() const {
    double p = 0.0;
    for (const auto& b : data_->boundary) p += b.ds;
    return p;
}

Point GridDomain::centroid() const {
    Point c;
    double m = 0.0;
    for (std::size_t k = 0; k < data_->phi.size(); ++k) {
        const double w = weight(k);
        if (w == 0.0) continue;
        c += w * cell_centroid(k);
        m += w;
    }
    return c / m;
}

std::vector<double> GridDomain::boundary_angles() const {
    const Point c = centroid();
    std::vector<double> out;
    out.reserve(data_->boundary.size());
    for (const auto& b : data_->boundary) out.push_back(std::atan2(b.position.y - c.y, b.position.x - c.x));
    return out;
}

std::size_t GridDomain::nearest_boundary_node(Point p) const {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < data_->boundary.size(); ++b) {
        const double d = distance(p, data_->boundary[b].position);
        if (d < bd) {
            bd = d;
            best = b;
        }
    }
    return best;
}

double GridDomain::interpolate_profile(const BoundaryProfile& profile, const BandEntry& entry) const {
    return (1.0 - entry.t) * profile[entry.a] + entry.t * profile[entry.b];
}

double GridDomain::distance_to_boundary(Point p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : data_->segments) {
        best = std::min(best, segment_distance(p, data_->boundary[a].position, data_->boundary[b].position, nullptr));
    }
    return best;
}

// ---- Measure ----------------------------------------------------------------

double Measure::total_mass() const {
    double m = 0.0;
    if (density.size() > 0) {
        for (double v : density.values()) m += v;
        m *= density.spec().h * density.spec().h;
    }
    for (const auto& a : atoms) m += a.mass;
    return m;
}

Measure Measure::indicator(const GridDomain& domain) {
    Measure mu;
    mu.density = ScalarField(domain.spec());
    for (std::size_t k = 0; k < domain.spec().size(); ++k) mu.density[k] = domain.weight(k);
    return mu;
}

Measure& Measure::add_atom(Point w, double mass) {
    if (!(mass > 0.0)) throw Error(ErrorCode::invalid_argument, "atom mass must be positive");
    atoms.push_back({w, mass});
    return *this;
}

// ---- constructors -----------------------------------------------------------

namespace {

void require_fits(const GridSpec& spec, Point center, double rx, double ry) {
    const Point lo = spec.origin + Point{2 * spec.h, 2 * spec.h};
    const Point hi = spec.upper() - Point{2 * spec.h, 2 * spec.h};
    if (center.x - rx <= lo.x || center.x + rx >= hi.x || center.y - ry <= lo.y || center.y + ry >= hi.y) {
        throw Error(ErrorCode::out_of_bounds, "shape does not fit the grid with a two-cell margin");
    }
}

// Distance from (y0, y1) >= 0 to the ellipse with semi-axes e0 >= e1 (bisection on the
// Lagrange multiplier).
double ellipse_distance_quadrant(double e0, double e1, double y0, double y1) {
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0;
            const double z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return 0.0;
            const double r0 = (e0 / e1) * (e0 / e1);
            const double n0 = r0 * z0;
            double s0 = z1 - 1.0;
            double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
            double s = 0.0;
            for (int it = 0; it < 200; ++it) {
                s = 0.5 * (s0 + s1);
                if (s == s0 || s == s1) break;
                const double ra = n0 / (s + r0);
                const double rb = z1 / (s + 1.0);
                const double gs = ra * ra + rb * rb - 1.0;
                if (gs > 0.0) s0 = s;
                else if (gs < 0.0) s1 = s;
                else break;
            }
            const double x0 = r0 * y0 / (s + r0);
            const double x1 = y1 / (s + 1.0);
            return std::hypot(x0 - y0, x1 - y1);
        }
        return std::abs(y1 - e1);
    }
    const double numer = e0 * y0;
    const double denom = e0 * e0 - e1 * e1;
    if (numer < denom) {
        const double xd = numer / denom;
        const double x0 = e0 * xd;
        const double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xd * xd));
        return std::hypot(x0 - y0, x1);
    }
    return std::abs(y0 - e0);
}

}  // namespace

GridDomain make_disk(Point center, double radius, const GridSpec& spec) {
    if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "disk radius must be positive");
    require_fits(spec, center, radius, radius);
    std::vector<double> phi(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) phi[k] = distance(spec.node(k), center) - radius;
    return GridDomain::from_phi(spec, std::move(phi));
}

GridDomain make_ellipse(Point center, double a, double b, const GridSpec& spec) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::invalid_argument, "ellipse semi-axes must be positive");
    if (a == b) return make_disk(center, a, spec);
    require_fits(spec, center, a, b);
    const bool swap = b > a;
    const double e0 = swap ? b : a;
    const double e1 = swap ? a : b;
    std::vector<double> phi(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const Point p = spec.node(k) - center;
        const double u = std::abs(swap ? p.y : p.x);
        const double v = std::abs(swap ? p.x : p.y);
        const double d = ellipse_distance_quadrant(e0, e1, u, v);
        const bool in = (u / e0) * (u / e0) + (v / e1) * (v / e1) < 1.0;
        phi[k] = in ? -d : d;
    }
    return GridDomain::from_phi(spec, std::move(phi));
}

GridDomain make_from_implicit(const GridSpec& spec, std::span<const double> implicit) {
    return GridDomain::from_phi(spec, reinitialize(spec, implicit));
}

GridDomain make_star(Point center, const std::function<double(double)>& radius, const GridSpec& spec) {
    std::vector<double> f(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const Point p = spec.node(k) - center;
        f[k] = norm(p) - radius(std::atan2(p.y, p.x));
    }
    return make_from_implicit(spec, f);
}

// ---- quadrature -------------------------------------------------------------

double integrate(const ScalarField& f, const GridDomain& domain) {
    if (!(f.spec() == domain.spec())) throw Error(ErrorCode::spec_mismatch, "integrand lives on a different grid");
    const GridSpec& spec = domain.spec();
    double sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double w = domain.weight(k);
        if (w == 0.0) continue;
        if (w == 1.0) {
            sum += f[k];
            continue;
        }
        // Cut cell: shift the sample to the centroid of the wet part.
        const Point g = central_gradient(spec, f.values(), k);
        sum += w * (f[k] + spec.h * dot(g, domain.cell_offset(k)));
    }
    return sum * spec.h * spec.h;
}

double boundary_integrate(const BoundaryProfile& p, const GridDomain& domain) {
    const auto nodes = domain.boundary();
    if (p.size() != nodes.size()) throw Error(ErrorCode::spec_mismatch, "profile not aligned with boundary");
    double sum = 0.0;
    for (std::size_t b = 0; b < nodes.size(); ++b) sum += p[b] * nodes[b].ds;
    return sum;
}

std::complex<double> harmonic_moment(const GridDomain& domain, int n) {
    if (n < 0 || n > 8) throw Error(ErrorCode::invalid_argument, "moments are limited to 0 <= n <= 8");
    const GridSpec& spec = domain.spec();
    std::complex<double> sum = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double w = domain.weight(k);
        if (w == 0.0) continue;
        const std::complex<double> z = to_complex(domain.cell_centroid(k));
        std::complex<double> zn = 1.0;
        for (int m = 0; m < n; ++m) zn *= z;
        sum += w * zn;
    }
    return sum * spec.h * spec.h;
}

double symmetric_difference_area(const GridDomain& a, const GridDomain& b) {
    if (!(a.spec() == b.spec())) throw Error(ErrorCode::spec_mismatch, "domains live on different grids");
    double s = 0.0;
    for (std::size_t k = 0; k < a.spec().size(); ++k) s += std::abs(a.weight(k) - b.weight(k));
    return s * a.spec().h * a.spec().h;
}

}  // namespace egrowth
