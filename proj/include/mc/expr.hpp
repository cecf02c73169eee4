#pragma once

#include <memory>
#include <string>

#include "mc/mesh.hpp"

namespace mc {

namespace detail {
struct ExprNode;
}

/// Closed-form scalar expression in the variables x and y. Supports
/// +, -, *, /, ^ (real exponent), parentheses, the functions sin, cos,
/// exp, sqrt, tanh, abs, the compact cutoff cut(z) = max(0, 1 - z^2)^3,
/// numeric literals, and pi. Symbolic
/// differentiation gives exact partial derivatives, so boundary data can
/// expose analytic gradients without a finite difference layer.
class Expr {
public:
    Expr(); // constant 0
    static Expr parse(const std::string& text);
    static Expr constant(double v);

    double operator()(double x, double y) const;
    double operator()(const Vec2& p) const { return (*this)(p.x(), p.y()); }

    Expr dx() const;
    Expr dy() const;

    std::string str() const;

private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const detail::ExprNode> node_;
};

/// Scalar expression bundled with its (symbolically computed) gradient.
class ScalarData {
public:
    ScalarData() : ScalarData(Expr::constant(0)) {}
    explicit ScalarData(Expr e) : f_(e), fx_(e.dx()), fy_(e.dy()) {}
    static ScalarData parse(const std::string& text) { return ScalarData(Expr::parse(text)); }

    double operator()(const Vec2& p) const { return f_(p); }
    Vec2 gradient(const Vec2& p) const { return {fx_(p), fy_(p)}; }
    const Expr& expr() const { return f_; }

private:
    Expr f_, fx_, fy_;
};

/// Two-component expression (e.g. u_in, u_des) with analytic Jacobian.
class VectorData {
public:
    VectorData() : VectorData(Expr::constant(0), Expr::constant(0)) {}
    VectorData(Expr ex, Expr ey) : x_(ex), y_(ey) {}
    static VectorData parse(const std::string& ex, const std::string& ey) {
        return {Expr::parse(ex), Expr::parse(ey)};
    }

    Vec2 operator()(const Vec2& p) const { return {x_(p), y_(p)}; }
    Mat2 jacobian(const Vec2& p) const {
        Mat2 J;
        Vec2 gx = x_.gradient(p), gy = y_.gradient(p);
        J << gx.x(), gx.y(), gy.x(), gy.y();
        return J;
    }
    const ScalarData& comp_x() const { return x_; }
    const ScalarData& comp_y() const { return y_; }

private:
    ScalarData x_, y_;
};

} // namespace mc
