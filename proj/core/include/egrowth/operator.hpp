#pragma once

#include <optional>

#include "egrowth/grid.hpp"

namespace egrowth {

enum class OperatorKind { laplace, schrodinger, beltrami };

const char* to_string(OperatorKind kind);

/// One of the three operator families: Laplacian, Schrödinger Δ - u, or
/// Laplace–Beltrami ∇·(λ∇). Coefficients live on the whole grid box.
class OperatorDesc {
public:
    /// Floor on the permeability λ.
    static constexpr double lambda_floor = 1e-6;

    static OperatorDesc laplace();
    /// u must be nonnegative wherever it is used (checked against each domain).
    static OperatorDesc schrodinger(ScalarField potential);
    static OperatorDesc beltrami(ScalarField lambda);

    OperatorKind kind() const { return kind_; }
    bool has_coefficient() const { return coefficient_.has_value(); }
    const ScalarField& coefficient() const;

    /// λ at a point (1 unless beltrami).
    double lambda_at(Point p) const;
    /// λ at a node (1 unless beltrami).
    double lambda_node(std::size_t k) const;
    /// Potential u at a node (0 unless schrodinger).
    double potential_node(std::size_t k) const;

    /// Throws unless the coefficient lives on `spec` and u >= 0 on the domain.
    void validate(const GridDomain& domain) const;

private:
    OperatorDesc(OperatorKind kind, std::optional<ScalarField> coefficient)
        : kind_(kind), coefficient_(std::move(coefficient)) {}

    OperatorKind kind_ = OperatorKind::laplace;
    std::optional<ScalarField> coefficient_;
};

}  // namespace egrowth
