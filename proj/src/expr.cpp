#include "mc/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace mc {
namespace detail {

enum class Op {
    Const, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Tanh, Abs,
    Cut,   // C^2 compact cutoff max(0, 1 - z^2)^3
    CutD,  // its derivative
    CutD2, // second derivative
};

struct ExprNode {
    Op op;
    double value = 0.0;
    std::shared_ptr<const ExprNode> a, b;
};

using NodeP = std::shared_ptr<const ExprNode>;

NodeP make(Op op, NodeP a = nullptr, NodeP b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodeP make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

bool is_const(const NodeP& n, double v) { return n->op == Op::Const && n->value == v; }

// simplifying constructors keep derivative trees small
NodeP add(NodeP a, NodeP b) {
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value + b->value);
    return make(Op::Add, std::move(a), std::move(b));
}
NodeP sub(NodeP a, NodeP b) {
    if (is_const(b, 0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value - b->value);
    if (is_const(a, 0)) return make(Op::Neg, std::move(b));
    return make(Op::Sub, std::move(a), std::move(b));
}
NodeP mul(NodeP a, NodeP b) {
    if (is_const(a, 0) || is_const(b, 0)) return make_const(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value * b->value);
    return make(Op::Mul, std::move(a), std::move(b));
}
NodeP divide(NodeP a, NodeP b) {
    if (is_const(a, 0)) return make_const(0);
    if (is_const(b, 1)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value / b->value);
    return make(Op::Div, std::move(a), std::move(b));
}

double eval(const ExprNode* n, double x, double y) {
    switch (n->op) {
        case Op::Const: return n->value;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Add: return eval(n->a.get(), x, y) + eval(n->b.get(), x, y);
        case Op::Sub: return eval(n->a.get(), x, y) - eval(n->b.get(), x, y);
        case Op::Mul: return eval(n->a.get(), x, y) * eval(n->b.get(), x, y);
        case Op::Div: return eval(n->a.get(), x, y) / eval(n->b.get(), x, y);
        case Op::Pow: return std::pow(eval(n->a.get(), x, y), eval(n->b.get(), x, y));
        case Op::Neg: return -eval(n->a.get(), x, y);
        case Op::Sin: return std::sin(eval(n->a.get(), x, y));
        case Op::Cos: return std::cos(eval(n->a.get(), x, y));
        case Op::Exp: return std::exp(eval(n->a.get(), x, y));
        case Op::Sqrt: return std::sqrt(eval(n->a.get(), x, y));
        case Op::Tanh: return std::tanh(eval(n->a.get(), x, y));
        case Op::Abs: return std::abs(eval(n->a.get(), x, y));
        case Op::Cut: {
            double z = eval(n->a.get(), x, y), s = 1 - z * z;
            return s > 0 ? s * s * s : 0.0;
        }
        case Op::CutD: {
            double z = eval(n->a.get(), x, y), s = 1 - z * z;
            return s > 0 ? -6.0 * z * s * s : 0.0;
        }
        case Op::CutD2: {
            double z = eval(n->a.get(), x, y), s = 1 - z * z;
            return s > 0 ? -6.0 * s * s + 24.0 * z * z * s : 0.0;
        }
    }
    return 0.0;
}

NodeP diff(const NodeP& n, bool wrt_x) {
    switch (n->op) {
        case Op::Const: return make_const(0);
        case Op::VarX: return make_const(wrt_x ? 1 : 0);
        case Op::VarY: return make_const(wrt_x ? 0 : 1);
        case Op::Add: return add(diff(n->a, wrt_x), diff(n->b, wrt_x));
        case Op::Sub: return sub(diff(n->a, wrt_x), diff(n->b, wrt_x));
        case Op::Mul: return add(mul(diff(n->a, wrt_x), n->b), mul(n->a, diff(n->b, wrt_x)));
        case Op::Div:
            return divide(sub(mul(diff(n->a, wrt_x), n->b), mul(n->a, diff(n->b, wrt_x))),
                          mul(n->b, n->b));
        case Op::Pow: {
            if (n->b->op != Op::Const)
                throw ConfigError("^ with non-constant exponent is not differentiable here");
            double e = n->b->value;
            // e * a^(e-1) * a'
            return mul(mul(make_const(e), make(Op::Pow, n->a, make_const(e - 1))),
                       diff(n->a, wrt_x));
        }
        case Op::Neg: return make(Op::Neg, diff(n->a, wrt_x));
        case Op::Sin: return mul(make(Op::Cos, n->a), diff(n->a, wrt_x));
        case Op::Cos: return make(Op::Neg, mul(make(Op::Sin, n->a), diff(n->a, wrt_x)));
        case Op::Exp: return mul(make(Op::Exp, n->a), diff(n->a, wrt_x));
        case Op::Sqrt:
            return divide(diff(n->a, wrt_x), mul(make_const(2), make(Op::Sqrt, n->a)));
        case Op::Tanh: {
            NodeP t = make(Op::Tanh, n->a);
            return mul(sub(make_const(1), mul(t, t)), diff(n->a, wrt_x));
        }
        case Op::Abs:
            throw ConfigError("abs is not differentiable; avoid it in data needing gradients");
        case Op::Cut: return mul(make(Op::CutD, n->a), diff(n->a, wrt_x));
        case Op::CutD: return mul(make(Op::CutD2, n->a), diff(n->a, wrt_x));
        case Op::CutD2:
            throw ConfigError("third derivative of cut() is not available");
    }
    return make_const(0);
}

std::string print(const ExprNode* n) {
    auto bin = [&](const char* op) {
        return "(" + print(n->a.get()) + op + print(n->b.get()) + ")";
    };
    auto fn = [&](const char* name) { return std::string(name) + "(" + print(n->a.get()) + ")"; };
    switch (n->op) {
        case Op::Const: {
            std::ostringstream os;
            os << n->value;
            return os.str();
        }
        case Op::VarX: return "x";
        case Op::VarY: return "y";
        case Op::Add: return bin("+");
        case Op::Sub: return bin("-");
        case Op::Mul: return bin("*");
        case Op::Div: return bin("/");
        case Op::Pow: return bin("^");
        case Op::Neg: return "(-" + print(n->a.get()) + ")";
        case Op::Sin: return fn("sin");
        case Op::Cos: return fn("cos");
        case Op::Exp: return fn("exp");
        case Op::Sqrt: return fn("sqrt");
        case Op::Tanh: return fn("tanh");
        case Op::Abs: return fn("abs");
        case Op::Cut: return fn("cut");
        case Op::CutD: return fn("cutd");
        case Op::CutD2: return fn("cutd2");
    }
    return "?";
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodeP parse() {
        NodeP e = expression();
        skip_ws();
        if (pos_ != s_.size())
            throw ConfigError("trailing characters in expression: '" + s_.substr(pos_) + "'");
        return e;
    }

private:
    NodeP expression() {
        NodeP e = term();
        for (;;) {
            skip_ws();
            if (accept('+')) e = add(e, term());
            else if (accept('-')) e = sub(e, term());
            else return e;
        }
    }
    NodeP term() {
        NodeP e = unary();
        for (;;) {
            skip_ws();
            if (accept('*')) e = mul(e, unary());
            else if (accept('/')) e = divide(e, unary());
            else return e;
        }
    }
    NodeP unary() {
        skip_ws();
        if (accept('-')) return make(Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }
    NodeP power() {
        NodeP base = primary();
        skip_ws();
        if (accept('^')) return make(Op::Pow, base, unary());
        return base;
    }
    NodeP primary() {
        skip_ws();
        if (pos_ >= s_.size()) throw ConfigError("unexpected end of expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodeP e = expression();
            skip_ws();
            if (!accept(')')) throw ConfigError("missing ')' in expression");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t len = 0;
            double v = std::stod(s_.substr(pos_), &len);
            pos_ += len;
            return make_const(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return make(Op::VarX);
            if (name == "y") return make(Op::VarY);
            if (name == "pi") return make_const(M_PI);
            static const std::map<std::string, Op> funcs = {
                {"sin", Op::Sin},   {"cos", Op::Cos},   {"exp", Op::Exp},  {"sqrt", Op::Sqrt},
                {"tanh", Op::Tanh}, {"abs", Op::Abs},   {"cut", Op::Cut}};
            auto it = funcs.find(name);
            if (it == funcs.end()) throw ConfigError("unknown symbol '" + name + "'");
            skip_ws();
            if (!accept('(')) throw ConfigError("expected '(' after " + name);
            NodeP arg = expression();
            skip_ws();
            if (!accept(')')) throw ConfigError("missing ')' after " + name + " argument");
            return make(it->second, arg);
        }
        throw ConfigError(std::string("unexpected character '") + c + "' in expression");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    const std::string& s_;
    size_t pos_ = 0;
};

} // namespace detail

Expr::Expr() : node_(detail::make_const(0)) {}

Expr Expr::parse(const std::string& text) { return Expr(detail::Parser(text).parse()); }

Expr Expr::constant(double v) { return Expr(detail::make_const(v)); }

double Expr::operator()(double x, double y) const { return detail::eval(node_.get(), x, y); }

Expr Expr::dx() const { return Expr(detail::diff(node_, true)); }
Expr Expr::dy() const { return Expr(detail::diff(node_, false)); }

std::string Expr::str() const { return detail::print(node_.get()); }

} // namespace mc
