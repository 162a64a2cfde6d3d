#include "egrowth/operator.hpp"

#include <algorithm>
#include <cmath>

namespace egrowth {

const char* to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::laplace: return "laplace";
        case OperatorKind::schrodinger: return "schrodinger";
        case OperatorKind::beltrami: return "beltrami";
    }
    return "unknown";
}

OperatorDesc OperatorDesc::laplace() { return OperatorDesc(OperatorKind::laplace, std::nullopt); }

OperatorDesc OperatorDesc::schrodinger(ScalarField potential) {
    if (!potential.all_finite()) throw Error(ErrorCode::invalid_argument, "potential has non-finite values");
    return OperatorDesc(OperatorKind::schrodinger, std::move(potential));
}

OperatorDesc OperatorDesc::beltrami(ScalarField lambda) {
    if (!lambda.all_finite()) throw Error(ErrorCode::invalid_argument, "lambda has non-finite values");
    for (double v : lambda.values()) {
        if (v < lambda_floor) {
            throw Error(ErrorCode::invalid_argument, "lambda below floor " + std::to_string(lambda_floor));
        }
    }
    return OperatorDesc(OperatorKind::beltrami, std::move(lambda));
}

const ScalarField& OperatorDesc::coefficient() const {
    if (!coefficient_) throw Error(ErrorCode::invalid_argument, "laplace operator has no coefficient");
    return *coefficient_;
}

double OperatorDesc::lambda_at(Point p) const {
    if (kind_ != OperatorKind::beltrami) return 1.0;
    return std::max(coefficient_->bicubic(p), lambda_floor);
}

double OperatorDesc::lambda_node(std::size_t k) const {
    return kind_ == OperatorKind::beltrami ? (*coefficient_)[k] : 1.0;
}

double OperatorDesc::potential_node(std::size_t k) const {
    return kind_ == OperatorKind::schrodinger ? (*coefficient_)[k] : 0.0;
}

void OperatorDesc::validate(const GridDomain& domain) const {
    if (!coefficient_) return;
    if (!(coefficient_->spec() == domain.spec())) {
        throw Error(ErrorCode::spec_mismatch, "operator coefficient lives on a different grid");
    }
    if (kind_ == OperatorKind::schrodinger) {
        const std::size_t n = domain.spec().size();
        for (std::size_t k = 0; k < n; ++k) {
            if (domain.inside(k) && (*coefficient_)[k] < 0.0) {
                throw Error(ErrorCode::invalid_argument, "schrodinger potential is negative inside the domain");
            }
        }
    }
}

}  // namespace egrowth
