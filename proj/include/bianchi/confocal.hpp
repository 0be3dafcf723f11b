#pragma once

#include <utility>

#include "bianchi/types.hpp"

namespace bianchi {

enum class QuadricKind { HyperboloidOneSheet, HyperbolicParaboloid };

/// Real doubly ruled confocal family in the normal form
///   hyperboloid  x_z(u,v) = (sqrt(a1-z)(1-uv), sqrt(z-a2)(1+uv), sqrt(a3-z)(u+v)) / (u-v)
///   paraboloid   x_z(u,v) = (sqrt(a1-z)(u+v), sqrt(z-a2)(u-v), 2uv + z/2)
/// with the implicit data (A, B, C) of the bordered form.
class ConfocalFamily {
public:
    static ConfocalFamily hyperboloid(double a1, double a2, double a3);
    static ConfocalFamily paraboloid(double a1, double a2);

    QuadricKind kind() const { return kind_; }
    bool is_hyperboloid() const { return kind_ == QuadricKind::HyperboloidOneSheet; }
    double a1() const { return a1_; }
    double a2() const { return a2_; }
    /// Third semiaxis constant; zero for the paraboloid.
    double a3() const { return a3_; }

    Mat3 A() const;
    Vec3 B() const;
    double C() const;

    /// Open admissible interval of the spectral parameter.
    std::pair<double, double> z_range() const;
    bool admissible(double z) const;
    void require_admissible(double z) const;

    /// Diagonal of sqrt(R_z), R_z = I - zA.
    Vec3 sqrt_rz(double z) const;
    /// Translation part C(z) of the Ivory affinity.
    Vec3 ivory_offset(double z) const;
    /// (sqrt(a1-z), sqrt(z-a2), sqrt(a3-z)); third entry unused for the paraboloid.
    Vec3 root_coefficients(double z) const;

private:
    ConfocalFamily(QuadricKind kind, double a1, double a2, double a3);

    QuadricKind kind_;
    double a1_, a2_, a3_;
};

enum class Chart { Finite, UAtInfinity, VAtInfinity };

/// Parameter point; the infinity charts hold the finite coordinate only.
struct ParamPoint {
    double u = 0.0;
    double v = 0.0;
    Chart chart = Chart::Finite;

    static ParamPoint finite(double u, double v) { return {u, v, Chart::Finite}; }
    static ParamPoint u_at_infinity(double v) { return {0.0, v, Chart::UAtInfinity}; }
    static ParamPoint v_at_infinity(double u) { return {u, 0.0, Chart::VAtInfinity}; }
};

enum class Ruling { U, V };

inline Ruling other(Ruling r) { return r == Ruling::U ? Ruling::V : Ruling::U; }

/// Second-order jet of a parametrized surface.
struct SurfaceJet {
    Vec3 x = Vec3::Zero();
    Vec3 x_u = Vec3::Zero();
    Vec3 x_v = Vec3::Zero();
    Vec3 x_uu = Vec3::Zero();
    Vec3 x_uv = Vec3::Zero();
    Vec3 x_vv = Vec3::Zero();

    Vec3 cross_normal() const { return x_u.cross(x_v); }
    Vec3 unit_normal() const { return cross_normal().normalized(); }
    /// Derivatives of unit_normal() in u and v.
    std::pair<Vec3, Vec3> unit_normal_derivatives() const;
    /// (E, F, G).
    Vec3 first_form() const { return {x_u.squaredNorm(), x_u.dot(x_v), x_v.squaredNorm()}; }
    /// (e, f, g) with respect to unit_normal().
    Vec3 second_form() const;
};

/// Jet of a confocal member, including the scaled normal N^_z = -2 d/dz x_z
/// and its parameter derivatives.
struct JetPoint : SurfaceJet {
    Vec3 normal = Vec3::Zero();
    Vec3 scaled_normal = Vec3::Zero();
    Vec3 scaled_normal_u = Vec3::Zero();
    Vec3 scaled_normal_v = Vec3::Zero();
};

inline constexpr double kDomainGuard = 1e-8;

JetPoint eval(const ConfocalFamily& family, double z, const ParamPoint& p,
              double domain_guard = kDomainGuard);

/// lim_{u->inf} x_z(u, v) on the hyperboloid.
Vec3 eval_at_infinity(const ConfocalFamily& family, double z, double v);

Vec3 ivory_map(const ConfocalFamily& family, double z, const Vec3& x0);
Vec3 inverse_ivory_map(const ConfocalFamily& family, double z, const Vec3& xz);
Vec3 ivory_ruling(const ConfocalFamily& family, double z, const Vec3& w0);

/// Bordered 4x4 matrix M(z) whose quadratic form [x;1]^T M [x;1] vanishes on x_z.
Eigen::Matrix4d bordered_form(const ConfocalFamily& family, double z);
double implicit_residual(const ConfocalFamily& family, double z, const Vec3& x);
Vec3 implicit_gradient(const ConfocalFamily& family, double z, const Vec3& x);

/// Scaled ruling B*x_{z,u} (u-family, depends on v only) or B*x_{z,v}
/// (v-family, depends on u only), B = (u-v)^2 on the hyperboloid, 1 on the paraboloid.
Vec3 ruling_direction(const ConfocalFamily& family, double z, const ParamPoint& p, Ruling fam,
                      double domain_guard = kDomainGuard);
/// Derivative of ruling_direction in the coordinate it depends on.
Vec3 ruling_direction_derivative(const ConfocalFamily& family, double z, const ParamPoint& p,
                                 Ruling fam);
/// Second derivative of ruling_direction in the coordinate it depends on.
Vec3 ruling_direction_second_derivative(const ConfocalFamily& family, double z, Ruling fam);

/// The metric factor B of the given parameter point.
double scale_factor(const ConfocalFamily& family, const ParamPoint& p);

} // namespace bianchi
