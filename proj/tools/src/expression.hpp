#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "egrowth/geometry.hpp"

namespace egrowth::cli {

/// Closed-form coefficient of (x, y).
///
///   expr   := term (('+' | '-') term)*
///   term   := factor ('*' factor)*
///   factor := number | 'x' | 'y' | 'r2' | '-' factor | '(' expr ')'
///           | 'exp' '(' expr ')' | 'besseli0' '(' expr ')' | 'pow' '(' expr ',' expr ')'
class Expression {
public:
    struct Node;

    /// Throws ExpressionError with the character offset of the problem.
    static Expression parse(const std::string& text);
    static Expression constant(double v);

    double operator()(Point p) const;
    double operator()(double x, double y) const { return (*this)({x, y}); }
    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

class ExpressionError : public std::runtime_error {
public:
    ExpressionError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace egrowth::cli
