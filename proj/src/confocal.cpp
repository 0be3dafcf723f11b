#include "bianchi/confocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bianchi {

ConfocalFamily::ConfocalFamily(QuadricKind kind, double a1, double a2, double a3)
    : kind_(kind), a1_(a1), a2_(a2), a3_(a3)
{
}

ConfocalFamily ConfocalFamily::hyperboloid(double a1, double a2, double a3)
{
    if (!(a2 < 0.0 && a1 > 0.0 && a3 > 0.0) || !std::isfinite(a1) || !std::isfinite(a2) ||
        !std::isfinite(a3))
        throw DomainError("hyperboloid family requires a2 < 0 < a1, a3 (got a1=" +
                          std::to_string(a1) + ", a2=" + std::to_string(a2) +
                          ", a3=" + std::to_string(a3) + ")");
    return ConfocalFamily(QuadricKind::HyperboloidOneSheet, a1, a2, a3);
}

ConfocalFamily ConfocalFamily::paraboloid(double a1, double a2)
{
    if (!(a2 < 0.0 && a1 > 0.0) || !std::isfinite(a1) || !std::isfinite(a2))
        throw DomainError("paraboloid family requires a2 < 0 < a1 (got a1=" +
                          std::to_string(a1) + ", a2=" + std::to_string(a2) + ")");
    return ConfocalFamily(QuadricKind::HyperbolicParaboloid, a1, a2, 0.0);
}

Mat3 ConfocalFamily::A() const
{
    Mat3 a = Mat3::Zero();
    a(0, 0) = 1.0 / a1_;
    a(1, 1) = 1.0 / a2_;
    a(2, 2) = is_hyperboloid() ? 1.0 / a3_ : 0.0;
    return a;
}

Vec3 ConfocalFamily::B() const
{
    return is_hyperboloid() ? Vec3::Zero() : Vec3(0.0, 0.0, -1.0);
}

double ConfocalFamily::C() const
{
    return is_hyperboloid() ? -1.0 : 0.0;
}

std::pair<double, double> ConfocalFamily::z_range() const
{
    if (is_hyperboloid())
        return {a2_, std::min(a1_, a3_)};
    return {a2_, a1_};
}

bool ConfocalFamily::admissible(double z) const
{
    auto [lo, hi] = z_range();
    return std::isfinite(z) && lo < z && z < hi;
}

void ConfocalFamily::require_admissible(double z) const
{
    if (!admissible(z)) {
        auto [lo, hi] = z_range();
        throw DomainError("spectral parameter z=" + std::to_string(z) +
                          " outside admissible interval (" + std::to_string(lo) + ", " +
                          std::to_string(hi) + ")");
    }
}

Vec3 ConfocalFamily::root_coefficients(double z) const
{
    return {std::sqrt(a1_ - z), std::sqrt(z - a2_), is_hyperboloid() ? std::sqrt(a3_ - z) : 0.0};
}

Vec3 ConfocalFamily::sqrt_rz(double z) const
{
    return {std::sqrt(1.0 - z / a1_), std::sqrt(1.0 - z / a2_),
            is_hyperboloid() ? std::sqrt(1.0 - z / a3_) : 1.0};
}

Vec3 ConfocalFamily::ivory_offset(double z) const
{
    return is_hyperboloid() ? Vec3::Zero() : Vec3(0.0, 0.0, 0.5 * z);
}

std::pair<Vec3, Vec3> SurfaceJet::unit_normal_derivatives() const
{
    const Vec3 n = cross_normal();
    const double len = n.norm();
    const Vec3 unit = n / len;
    const Vec3 n_u = x_uu.cross(x_v) + x_u.cross(x_uv);
    const Vec3 n_v = x_uv.cross(x_v) + x_u.cross(x_vv);
    return {(n_u - unit * unit.dot(n_u)) / len, (n_v - unit * unit.dot(n_v)) / len};
}

Vec3 SurfaceJet::second_form() const
{
    const Vec3 n = unit_normal();
    return {n.dot(x_uu), n.dot(x_uv), n.dot(x_vv)};
}

namespace {

void check_finite_chart(const ConfocalFamily& family, const ParamPoint& p, double guard)
{
    if (!std::isfinite(p.u) || !std::isfinite(p.v))
        throw DomainError("non-finite parameter coordinates");
    if (family.is_hyperboloid() && p.chart == Chart::Finite && std::abs(p.u - p.v) < guard)
        throw DomainError("hyperboloid chart requires |u - v| >= " + std::to_string(guard) +
                          " (u=" + std::to_string(p.u) + ", v=" + std::to_string(p.v) + ")");
    if (!family.is_hyperboloid() && p.chart != Chart::Finite)
        throw KindError("infinity charts exist only on the hyperboloid");
}

JetPoint hyperboloid_jet(const Vec3& s, double u, double v)
{
    const double d = u - v;
    const double d2 = d * d;
    const double d3 = d2 * d;
    const Vec3 g(s[0] * (v * v - 1.0), -s[1] * (v * v + 1.0), -2.0 * s[2] * v);
    const Vec3 dg(2.0 * s[0] * v, -2.0 * s[1] * v, -2.0 * s[2]);
    const Vec3 h(s[0] * (1.0 - u * u), s[1] * (1.0 + u * u), 2.0 * s[2] * u);

    JetPoint j;
    j.x = Vec3(s[0] * (1.0 - u * v), s[1] * (1.0 + u * v), s[2] * (u + v)) / d;
    j.x_u = g / d2;
    j.x_v = h / d2;
    j.x_uu = -2.0 * g / d3;
    j.x_uv = dg / d2 + 2.0 * g / d3;
    j.x_vv = 2.0 * h / d3;
    // -2 d/dz of each entry: d sqrt(a1-z) = -1/(2 s1), d sqrt(z-a2) = 1/(2 s2), ...
    const Vec3 ds(-0.5 / s[0], 0.5 / s[1], -0.5 / s[2]);
    j.scaled_normal = -2.0 * Vec3(ds[0] * (1.0 - u * v), ds[1] * (1.0 + u * v), ds[2] * (u + v)) / d;
    const Vec3 k(-2.0 * ds[0] / s[0], -2.0 * ds[1] / s[1], -2.0 * ds[2] / s[2]);
    j.scaled_normal_u = k.cwiseProduct(j.x_u);
    j.scaled_normal_v = k.cwiseProduct(j.x_v);
    return j;
}

JetPoint hyperboloid_jet_u_infinity(const Vec3& s, double v)
{
    JetPoint j;
    j.x = Vec3(-s[0] * v, s[1] * v, s[2]);
    j.x_v = Vec3(-s[0], s[1], 0.0);
    j.scaled_normal = Vec3(-v / s[0], -v / s[1], 1.0 / s[2]);
    j.scaled_normal_v = Vec3(-1.0 / s[0], -1.0 / s[1], 0.0);
    return j;
}

JetPoint hyperboloid_jet_v_infinity(const Vec3& s, double u)
{
    JetPoint j;
    j.x = Vec3(s[0] * u, -s[1] * u, -s[2]);
    j.x_u = Vec3(s[0], -s[1], 0.0);
    j.scaled_normal = Vec3(u / s[0], u / s[1], -1.0 / s[2]);
    j.scaled_normal_u = Vec3(1.0 / s[0], 1.0 / s[1], 0.0);
    return j;
}

JetPoint paraboloid_jet(const Vec3& s, double z, double u, double v)
{
    JetPoint j;
    j.x = Vec3(s[0] * (u + v), s[1] * (u - v), 2.0 * u * v + 0.5 * z);
    j.x_u = Vec3(s[0], s[1], 2.0 * v);
    j.x_v = Vec3(s[0], -s[1], 2.0 * u);
    j.x_uv = Vec3(0.0, 0.0, 2.0);
    j.scaled_normal = Vec3((u + v) / s[0], -(u - v) / s[1], -1.0);
    j.scaled_normal_u = Vec3(1.0 / s[0], -1.0 / s[1], 0.0);
    j.scaled_normal_v = Vec3(1.0 / s[0], 1.0 / s[1], 0.0);
    return j;
}

} // namespace

JetPoint eval(const ConfocalFamily& family, double z, const ParamPoint& p, double domain_guard)
{
    family.require_admissible(z);
    check_finite_chart(family, p, domain_guard);
    const Vec3 s = family.root_coefficients(z);

    JetPoint j;
    if (family.is_hyperboloid()) {
        switch (p.chart) {
        case Chart::Finite: j = hyperboloid_jet(s, p.u, p.v); break;
        case Chart::UAtInfinity: j = hyperboloid_jet_u_infinity(s, p.v); break;
        case Chart::VAtInfinity: j = hyperboloid_jet_v_infinity(s, p.u); break;
        }
    } else {
        j = paraboloid_jet(s, z, p.u, p.v);
    }
    j.normal = j.scaled_normal.normalized();
    return j;
}

Vec3 eval_at_infinity(const ConfocalFamily& family, double z, double v)
{
    if (!family.is_hyperboloid())
        throw KindError("eval_at_infinity is defined only for the hyperboloid");
    family.require_admissible(z);
    const Vec3 s = family.root_coefficients(z);
    return {-s[0] * v, s[1] * v, s[2]};
}

Vec3 ivory_map(const ConfocalFamily& family, double z, const Vec3& x0)
{
    family.require_admissible(z);
    return family.sqrt_rz(z).cwiseProduct(x0) + family.ivory_offset(z);
}

Vec3 inverse_ivory_map(const ConfocalFamily& family, double z, const Vec3& xz)
{
    family.require_admissible(z);
    return (xz - family.ivory_offset(z)).cwiseQuotient(family.sqrt_rz(z));
}

Vec3 ivory_ruling(const ConfocalFamily& family, double z, const Vec3& w0)
{
    return family.sqrt_rz(z).cwiseProduct(w0);
}

Eigen::Matrix4d bordered_form(const ConfocalFamily& family, double z)
{
    const Mat3 a = family.A();
    const Vec3 b = family.B();
    Mat3 r_inv = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
        r_inv(i, i) = 1.0 / (1.0 - z * a(i, i));

    Eigen::Matrix4d m;
    m.topLeftCorner<3, 3>() = a * r_inv;
    m.topRightCorner<3, 1>() = r_inv * b;
    m.bottomLeftCorner<1, 3>() = (r_inv * b).transpose();
    m(3, 3) = family.C() + z * b.dot(r_inv * b);
    return m;
}

double implicit_residual(const ConfocalFamily& family, double z, const Vec3& x)
{
    const Eigen::Vector4d h(x.x(), x.y(), x.z(), 1.0);
    return h.dot(bordered_form(family, z) * h);
}

Vec3 implicit_gradient(const ConfocalFamily& family, double z, const Vec3& x)
{
    const Eigen::Matrix4d m = bordered_form(family, z);
    const Eigen::Vector4d h(x.x(), x.y(), x.z(), 1.0);
    return 2.0 * (m * h).head<3>();
}

Vec3 ruling_direction(const ConfocalFamily& family, double z, const ParamPoint& p, Ruling fam,
                      double domain_guard)
{
    family.require_admissible(z);
    check_finite_chart(family, p, domain_guard);
    const Vec3 s = family.root_coefficients(z);
    if (!family.is_hyperboloid()) {
        return fam == Ruling::U ? Vec3(s[0], s[1], 2.0 * p.v) : Vec3(s[0], -s[1], 2.0 * p.u);
    }
    if (fam == Ruling::U) {
        if (p.chart == Chart::VAtInfinity)
            throw DomainError("u-family ruling undefined at v = infinity");
        const double v = p.v;
        return {s[0] * (v * v - 1.0), -s[1] * (v * v + 1.0), -2.0 * s[2] * v};
    }
    if (p.chart == Chart::UAtInfinity)
        throw DomainError("v-family ruling undefined at u = infinity");
    const double u = p.u;
    return {s[0] * (1.0 - u * u), s[1] * (1.0 + u * u), 2.0 * s[2] * u};
}

Vec3 ruling_direction_derivative(const ConfocalFamily& family, double z, const ParamPoint& p,
                                 Ruling fam)
{
    family.require_admissible(z);
    const Vec3 s = family.root_coefficients(z);
    if (!family.is_hyperboloid())
        return {0.0, 0.0, 2.0};
    if (fam == Ruling::U)
        return {2.0 * s[0] * p.v, -2.0 * s[1] * p.v, -2.0 * s[2]};
    return {-2.0 * s[0] * p.u, 2.0 * s[1] * p.u, 2.0 * s[2]};
}

Vec3 ruling_direction_second_derivative(const ConfocalFamily& family, double z, Ruling fam)
{
    family.require_admissible(z);
    if (!family.is_hyperboloid())
        return Vec3::Zero();
    const Vec3 s = family.root_coefficients(z);
    return fam == Ruling::U ? Vec3(2.0 * s[0], -2.0 * s[1], 0.0) : Vec3(-2.0 * s[0], 2.0 * s[1], 0.0);
}

double scale_factor(const ConfocalFamily& family, const ParamPoint& p)
{
    if (!family.is_hyperboloid())
        return 1.0;
    if (p.chart != Chart::Finite)
        return std::numeric_limits<double>::infinity();
    return (p.u - p.v) * (p.u - p.v);
}

} // namespace bianchi
