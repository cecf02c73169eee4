#pragma once

#include <functional>
#include <limits>
#include <string>

#include "mc/expr.hpp"
#include "mc/mesh.hpp"

namespace mc {

struct SupportBox {
    Vec2 lo{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    Vec2 hi{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    bool contains(const Vec2& p) const {
        return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
    }
    static SupportBox everywhere() { return {}; }
};

/// Closed-form vector field with analytic Jacobian, extended by zero outside
/// its declared support box. Candidates for the speed-method direction V;
/// whether a concrete field vanishes on the inlet and outlet is checked
/// separately (check_admissible).
class AdmissibleField {
public:
    AdmissibleField() = default;
    AdmissibleField(std::function<Vec2(const Vec2&)> value,
                    std::function<Mat2(const Vec2&)> jacobian,
                    SupportBox support = SupportBox::everywhere())
        : value_(std::move(value)), jacobian_(std::move(jacobian)), support_(support) {}

    Vec2 operator()(const Vec2& p) const {
        if (!value_ || !support_.contains(p)) return Vec2::Zero();
        return value_(p);
    }
    Mat2 jacobian(const Vec2& p) const {
        if (!jacobian_ || !support_.contains(p)) return Mat2::Zero();
        return jacobian_(p);
    }
    const SupportBox& support() const { return support_; }

    double divergence(const Vec2& p) const { return jacobian(p).trace(); }
    Mat2 strain(const Vec2& p) const {
        Mat2 J = jacobian(p);
        return 0.5 * (J + J.transpose());
    }

    // --- constructors ---

    static AdmissibleField zero();
    static AdmissibleField constant(const Vec2& c, SupportBox box = SupportBox::everywhere());
    /// V(x) = M x + c (support box everywhere; an oracle field, not in Xi).
    static AdmissibleField affine(const Mat2& M, const Vec2& c = Vec2::Zero());
    /// Translation by `amplitude`, localized with the C^2 cutoff
    /// prod_i max(0, 1 - ((x_i - c_i)/r_i)^2)^3 supported in the box c +- r.
    static AdmissibleField bump(const Vec2& center, const Vec2& radius, const Vec2& amplitude);
    /// Vertical displacement of a horizontal wall: V = (0, a * b((x - c)/r))
    /// with the same 1D cutoff, vanishing at x = c +- r.
    static AdmissibleField wall_normal_bump(double center_x, double radius, double amplitude);
    /// Polynomial direction times the bump cutoff: V = bump * (p1(x), p2(x)).
    static AdmissibleField poly_bump(const Vec2& center, const Vec2& radius,
                                     const VectorData& poly);
    /// Field from a pair of closed-form expressions.
    static AdmissibleField from_expr(const VectorData& v,
                                     SupportBox box = SupportBox::everywhere());
    /// Look up a named construction (used by the CLI config); see the README
    /// for the catalogue.
    static AdmissibleField named(const std::string& name);

private:
    std::function<Vec2(const Vec2&)> value_;
    std::function<Mat2(const Vec2&)> jacobian_;
    SupportBox support_;
};

struct AdmissibilityReport {
    double max_boundary_value = 0.0;    // max |V| over inlet/outlet quadrature points
    double max_boundary_jacobian = 0.0; // same for |DV|
    double max_fd_deviation = 0.0;      // jacobian vs central differences
    bool admissible(double boundary_tol = 1e-12, double fd_tol = 1e-6) const {
        return max_boundary_value <= boundary_tol && max_fd_deviation <= fd_tol;
    }
};

/// Samples inlet/outlet quadrature points of the mesh and random interior
/// points (deterministic seed) to check the field's contracts.
AdmissibilityReport check_admissible(const AdmissibleField& field, const Mesh& mesh,
                                     int n_samples = 100, unsigned seed = 7);

} // namespace mc
