#include "expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "egrowth/special.hpp"

namespace egrowth::cli {

struct Expression::Node {
    enum class Op { number, x, y, r2, neg, add, sub, mul, exp, i0, pow } op = Op::number;
    double value = 0.0;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(Point p) const {
        switch (op) {
            case Op::number: return value;
            case Op::x: return p.x;
            case Op::y: return p.y;
            case Op::r2: return p.x * p.x + p.y * p.y;
            case Op::neg: return -args[0]->eval(p);
            case Op::add: return args[0]->eval(p) + args[1]->eval(p);
            case Op::sub: return args[0]->eval(p) - args[1]->eval(p);
            case Op::mul: return args[0]->eval(p) * args[1]->eval(p);
            case Op::exp: return std::exp(args[0]->eval(p));
            case Op::i0: return bessel_i0(args[0]->eval(p));
            case Op::pow: return std::pow(args[0]->eval(p), args[1]->eval(p));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->value = value;
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ExpressionError(what, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Op::add, {lhs, term()});
            else if (accept('-')) lhs = make(Op::sub, {lhs, term()});
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        while (accept('*')) lhs = make(Op::mul, {lhs, factor()});
        return lhs;
    }

    NodePtr factor() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        if (accept('-')) return make(Op::neg, {factor()});
        if (accept('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return word();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        double v = 0.0;
        const auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
        if (res.ec != std::errc()) fail("bad number");
        pos_ = static_cast<std::size_t>(res.ptr - s_.data());
        return make(Op::number, {}, v);
    }

    NodePtr word() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string w = s_.substr(start, pos_ - start);
        if (w == "x") return make(Op::x);
        if (w == "y") return make(Op::y);
        if (w == "r2") return make(Op::r2);
        if (w == "exp" || w == "besseli0") {
            expect('(');
            NodePtr a = expr();
            expect(')');
            return make(w == "exp" ? Op::exp : Op::i0, {a});
        }
        if (w == "pow") {
            expect('(');
            NodePtr a = expr();
            expect(',');
            NodePtr b = expr();
            expect(')');
            return make(Op::pow, {a, b});
        }
        pos_ = start;
        fail("unknown name '" + w + "'");
    }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.text_ = text;
    e.root_ = Parser(text).parse();
    return e;
}

Expression Expression::constant(double v) {
    Expression e;
    e.text_ = std::to_string(v);
    e.root_ = make(Op::number, {}, v);
    return e;
}

double Expression::operator()(Point p) const { return root_->eval(p); }

}  // namespace egrowth::cli
