#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "egrowth/error.hpp"
#include "egrowth/geometry.hpp"

namespace egrowth {

/// Uniform Cartesian node lattice. Node (i, j) sits at origin + h * (i, j);
/// storage is row-major with i fastest.
struct GridSpec {
    Point origin;
    double h = 0.0;
    int nx = 0;
    int ny = 0;

    GridSpec() = default;
    GridSpec(Point origin, double h, int nx, int ny);

    /// n x n nodes covering [lo, hi]^2 including both ends.
    static GridSpec square(double lo, double hi, int n);

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
    }
    int i_of(std::size_t k) const { return static_cast<int>(k % static_cast<std::size_t>(nx)); }
    int j_of(std::size_t k) const { return static_cast<int>(k / static_cast<std::size_t>(nx)); }
    double x(int i) const { return origin.x + h * i; }
    double y(int j) const { return origin.y + h * j; }
    Point node(int i, int j) const { return {x(i), y(j)}; }
    Point node(std::size_t k) const { return node(i_of(k), j_of(k)); }
    Point upper() const { return node(nx - 1, ny - 1); }

    /// True when p lies at least `margin` inside the bounding box.
    bool contains(Point p, double margin = 0.0) const;

    friend bool operator==(const GridSpec& a, const GridSpec& b);
};

/// Real values on every node of a GridSpec.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& spec, double fill = 0.0);
    ScalarField(const GridSpec& spec, std::vector<double> values);

    /// Samples fn at every node.
    static ScalarField sample(const GridSpec& spec, const std::function<double(Point)>& fn);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double at(int i, int j) const { return values_[spec_.index(i, j)]; }
    double& at(int i, int j) { return values_[spec_.index(i, j)]; }

    /// Bilinear interpolation; p must lie inside the box.
    double bilinear(Point p) const;
    /// Tensor-cubic Lagrange interpolation over the surrounding 4x4 nodes.
    double bicubic(Point p) const;

    double max_abs() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
    /// this += s * o
    ScalarField& axpy(double s, const ScalarField& o);

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
    /// Pointwise product.
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b);

private:
    GridSpec spec_;
    std::vector<double> values_;
};

/// A point on the zero level set where it crosses a grid edge.
struct BoundaryNode {
    Point position;
    Point normal;          // outward unit normal
    double ds = 0.0;       // arclength weight
    std::size_t inside = 0;   // grid index of the interior endpoint of the crossed edge
    std::size_t outside = 0;  // grid index of the exterior endpoint
    double theta = 0.0;       // fractional distance from `inside` to the crossing
    int loop = 0;             // which closed contour the node belongs to
};

/// Closest-point data for a node near the interface.
struct BandEntry {
    std::size_t node = 0;
    std::size_t a = 0;  // boundary node indices of the closest segment
    std::size_t b = 0;
    double t = 0.0;     // closest point = (1 - t) * a + t * b
    Point closest;
    double distance = 0.0;  // signed, negative inside
};

class GridDomain;

/// Values aligned with the boundary list of one GridDomain.
class BoundaryProfile {
public:
    BoundaryProfile() = default;
    explicit BoundaryProfile(std::vector<double> values) : values_(std::move(values)) {}
    BoundaryProfile(const GridDomain& domain, const std::function<double(const BoundaryNode&)>& fn);

    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double max_abs() const;

private:
    std::vector<double> values_;
};

/// Bounded planar domain stored as a signed-distance level set. Immutable and
/// cheap to copy (shared state).
class GridDomain {
public:
    /// Half-width of the closest-point band, in cells.
    static constexpr double band_cells = 6.0;

    GridDomain() = default;

    /// Builds mask, boundary, and band from a level-set function that is close
    /// to a signed distance (negative inside).
    static GridDomain from_phi(const GridSpec& spec, std::vector<double> phi);

    const GridSpec& spec() const { return data_->spec; }
    std::span<const double> phi() const { return data_->phi; }
    double phi(std::size_t k) const { return data_->phi[k]; }
    bool inside(std::size_t k) const { return data_->mask[k] != 0; }
    std::span<const std::uint8_t> mask() const { return data_->mask; }
    std::span<const BoundaryNode> boundary() const { return data_->boundary; }
    /// Consecutive boundary node pairs (a -> b) with the interior on the left.
    std::span<const std::pair<std::size_t, std::size_t>> segments() const { return data_->segments; }
    std::span<const BandEntry> band() const { return data_->band; }
    /// Boundary node on the edge from interior node k in direction dir
    /// (0:+x 1:-x 2:+y 3:-y), or -1.
    int crossing(std::size_t k, int dir) const { return data_->crossing[4 * k + static_cast<std::size_t>(dir)]; }
    std::size_t interior_count() const { return data_->interior_count; }

    /// Cut-cell quadrature weight: fraction of the node's dual cell on the
    /// inside of the locally linearized interface.
    double weight(std::size_t k) const { return data_->weight[k]; }
    /// Centroid of the wet part of the dual cell, relative to the node, in cells.
    Point cell_offset(std::size_t k) const { return data_->offset[k]; }
    Point cell_centroid(std::size_t k) const;
    double area() const;
    double perimeter() const;
    Point centroid() const;
    /// Polar angle of each boundary node about the centroid.
    std::vector<double> boundary_angles() const;

    /// Index of the boundary node closest to p.
    std::size_t nearest_boundary_node(Point p) const;
    /// Linear interpolation of a boundary profile along the closest segment.
    double interpolate_profile(const BoundaryProfile& profile, const BandEntry& entry) const;

    /// Distance from p to the interface polyline (unsigned).
    double distance_to_boundary(Point p) const;

    bool same_as(const GridDomain& o) const { return data_ == o.data_; }

private:
    struct Data {
        GridSpec spec;
        std::vector<double> phi;
        std::vector<std::uint8_t> mask;
        std::vector<BoundaryNode> boundary;
        std::vector<std::pair<std::size_t, std::size_t>> segments;
        std::vector<BandEntry> band;
        std::vector<int> crossing;
        std::vector<double> weight;
        std::vector<Point> offset;
        std::size_t interior_count = 0;
    };
    std::shared_ptr<const Data> data_;
};

struct Atom {
    Point position;
    double mass = 0.0;
};

/// Finite positive measure: grid density plus point atoms.
struct Measure {
    ScalarField density;
    std::vector<Atom> atoms;

    double total_mass() const;
    /// Indicator of a domain with cut-cell weights, i.e. Lebesgue measure restricted to D.
    static Measure indicator(const GridDomain& domain);
    Measure& add_atom(Point w, double mass);
};

// ---- constructors -------------------------------------------------------

GridDomain make_disk(Point center, double radius, const GridSpec& spec);
/// Ellipse with semi-axes a (along x) and b (along y).
GridDomain make_ellipse(Point center, double a, double b, const GridSpec& spec);
/// Domain {f < 0} for an arbitrary implicit function sampled on the grid; the
/// result is reinitialized to a signed distance.
GridDomain make_from_implicit(const GridSpec& spec, std::span<const double> implicit);
/// Star-shaped domain r < radius(theta) about center.
GridDomain make_star(Point center, const std::function<double(double)>& radius, const GridSpec& spec);

/// Signed distance to the zero contour of `implicit`, sign taken from implicit.
std::vector<double> reinitialize(const GridSpec& spec, std::span<const double> implicit);

// ---- quadrature ----------------------------------------------------------

double integrate(const ScalarField& f, const GridDomain& domain);
double boundary_integrate(const BoundaryProfile& p, const GridDomain& domain);
/// t_n = integral over D of z^n dA, 0 <= n <= 8.
std::complex<double> harmonic_moment(const GridDomain& domain, int n);

/// Area of the symmetric difference of two domains on the same grid (cut-cell weights).
double symmetric_difference_area(const GridDomain& a, const GridDomain& b);

}  // namespace egrowth
