#include "bianchi/tangency.hpp"

#include <algorithm>
#include <cmath>

namespace bianchi {

TangencyConfig make_config(const ConfocalFamily& family, double z, double u0, double v0,
                           const ParamPoint& p1)
{
    TangencyConfig c{family, z, u0, v0, p1};
    const JetPoint base = eval(family, 0.0, ParamPoint::finite(u0, v0));
    c.x00 = base.x;
    c.scaled_normal00 = base.scaled_normal;
    c.normal00 = base.normal;
    c.V01 = eval(family, z, p1).x - c.x00;
    c.b1 = scale_factor(family, p1);
    return c;
}

namespace {

// Relation written as a*t + b = 0 in the free coordinate t.
struct AffineRelation {
    double a, b, scale_a, scale_b;
};

enum class Unknown { U1, V1 };

AffineRelation relation(const ConfocalFamily& family, double z, const Vec3& x00, const Vec3& n,
                        double known, Unknown unknown)
{
    const Vec3 s = family.root_coefficients(z);
    Vec3 p, q;
    if (family.is_hyperboloid()) {
        // (u1 - v1) x_z(u1, v1) = p + t q, cleared by the same factor on x00.
        if (unknown == Unknown::U1) {
            p = Vec3(s[0], s[1], s[2] * known);
            q = Vec3(-s[0] * known, s[1] * known, s[2]);
            const double xn = x00.dot(n);
            return {q.dot(n) - xn, p.dot(n) + known * xn,
                    (q.norm() + x00.norm()) * n.norm(),
                    (p.norm() + std::abs(known) * x00.norm()) * n.norm()};
        }
        p = Vec3(s[0], s[1], s[2] * known);
        q = Vec3(-s[0] * known, s[1] * known, s[2]);
        const double xn = x00.dot(n);
        return {q.dot(n) + xn, p.dot(n) - known * xn, (q.norm() + x00.norm()) * n.norm(),
                (p.norm() + std::abs(known) * x00.norm()) * n.norm()};
    }
    if (unknown == Unknown::U1) {
        p = Vec3(s[0] * known, -s[1] * known, 0.5 * z);
        q = Vec3(s[0], s[1], 2.0 * known);
    } else {
        p = Vec3(s[0] * known, s[1] * known, 0.5 * z);
        q = Vec3(s[0], -s[1], 2.0 * known);
    }
    return {q.dot(n), (p - x00).dot(n), q.norm() * n.norm(), (p.norm() + x00.norm()) * n.norm()};
}

TangencyConfig solve(const ConfocalFamily& family, double z, double u0, double v0, double known,
                     Unknown unknown)
{
    family.require_admissible(z);
    const JetPoint base = eval(family, 0.0, ParamPoint::finite(u0, v0));
    const AffineRelation rel = relation(family, z, base.x, base.scaled_normal, known, unknown);
    const bool a_zero = std::abs(rel.a) <= kInfinityRouting * rel.scale_a;
    const bool b_zero = std::abs(rel.b) <= kInfinityRouting * std::max(rel.scale_b, rel.scale_a);

    auto at = [&](double t) {
        return unknown == Unknown::U1 ? ParamPoint::finite(t, known) : ParamPoint::finite(known, t);
    };

    if (a_zero && b_zero) {
        // Every partner on the ruling lies in the tangent plane; represent by the base coordinate.
        TangencyConfig c = make_config(family, z, u0, v0, at(unknown == Unknown::U1 ? u0 : v0));
        c.free_ruling = true;
        return c;
    }
    if (a_zero) {
        if (!family.is_hyperboloid())
            throw NoSolutionError("tangency relation degenerates to a nonzero constant");
        const ParamPoint p = unknown == Unknown::U1 ? ParamPoint::u_at_infinity(known)
                                                    : ParamPoint::v_at_infinity(known);
        return make_config(family, z, u0, v0, p);
    }
    const double t = -rel.b / rel.a;
    if (family.is_hyperboloid() && std::abs(t - known) < kDomainGuard)
        throw NoSolutionError("tangent partner falls on the excluded diagonal u1 = v1");
    return make_config(family, z, u0, v0, at(t));
}

} // namespace

TangencyConfig solve_tangency(const ConfocalFamily& family, double z, double u0, double v0,
                              double v1)
{
    return solve(family, z, u0, v0, v1, Unknown::U1);
}

TangencyConfig solve_tangency_for_v1(const ConfocalFamily& family, double z, double u0,
                                     double v0, double u1)
{
    return solve(family, z, u0, v0, u1, Unknown::V1);
}

TangencyConfig solve_for_state(const ConfocalFamily& family, double z, double u0, double v0,
                               double state, MFamily flavor)
{
    return flavor == MFamily::M ? solve_tangency(family, z, u0, v0, state)
                                : solve_tangency_for_v1(family, z, u0, v0, state);
}

double tangency_residual(const TangencyConfig& config)
{
    return safe_ratio(std::abs(config.V01.dot(config.scaled_normal00)),
                      config.V01.norm() * config.scaled_normal00.norm());
}

double tangency_polynomial(const ConfocalFamily& family, double z, double u0, double v0,
                           double u1, double v1)
{
    family.require_admissible(z);
    const Vec3 s0 = family.root_coefficients(0.0);
    const Vec3 sz = family.root_coefficients(z);
    if (family.is_hyperboloid()) {
        // (u-v) x and (u-v) N^ are bilinear; x_0^T N^_0 = x_0^T A x_0 = 1.
        const Vec3 cx1(sz[0] * (1.0 - u1 * v1), sz[1] * (1.0 + u1 * v1), sz[2] * (u1 + v1));
        const Vec3 cx0(s0[0] * (1.0 - u0 * v0), s0[1] * (1.0 + u0 * v0), s0[2] * (u0 + v0));
        const Vec3 cn0(cx0[0] / (s0[0] * s0[0]), -cx0[1] / (s0[1] * s0[1]), cx0[2] / (s0[2] * s0[2]));
        return cx1.dot(cn0) - (u1 - v1) * (u0 - v0);
    }
    const Vec3 x1(sz[0] * (u1 + v1), sz[1] * (u1 - v1), 2.0 * u1 * v1 + 0.5 * z);
    const Vec3 x0(s0[0] * (u0 + v0), s0[1] * (u0 - v0), 2.0 * u0 * v0);
    const Vec3 n0((u0 + v0) / s0[0], -(u0 - v0) / s0[1], -1.0);
    return (x1 - x0).dot(n0);
}

MField m_field(const TangencyConfig& config, MFamily family)
{
    const Ruling r = ruling_of(family);
    const JetPoint jz = eval(config.family, config.z, config.p1);
    const Vec3 w = ruling_direction(config.family, config.z, config.p1, r);
    const Vec3 dw = ruling_direction_derivative(config.family, config.z, config.p1, r);
    // The state variable moves the partner along the other ruling.
    const Vec3 dx = family == MFamily::M ? jz.x_v : jz.x_u;
    return {w.cross(config.V01), dw.cross(config.V01) + w.cross(dx), family};
}

MField m_field_at_state(const ConfocalFamily& family, double z, double u0, double v0,
                        double state, MFamily flavor)
{
    family.require_admissible(z);
    const Vec3 x00 = eval(family, 0.0, ParamPoint::finite(u0, v0)).x;
    const Vec3 s = family.root_coefficients(z);
    const bool hyp = family.is_hyperboloid();
    Vec3 anchor, anchor_d;
    ParamPoint p;
    if (flavor == MFamily::M) {
        // Anchor on the u-ruling through v1: u = infinity (hyperboloid) or u = 0.
        p = ParamPoint::finite(0.0, state);
        anchor = hyp ? Vec3(-s[0] * state, s[1] * state, s[2])
                     : Vec3(s[0] * state, -s[1] * state, 0.5 * z);
        anchor_d = hyp ? Vec3(-s[0], s[1], 0.0) : Vec3(s[0], -s[1], 0.0);
    } else {
        p = ParamPoint::finite(state, 0.0);
        anchor = hyp ? Vec3(s[0] * state, -s[1] * state, -s[2])
                     : Vec3(s[0] * state, s[1] * state, 0.5 * z);
        anchor_d = hyp ? Vec3(s[0], -s[1], 0.0) : Vec3(s[0], s[1], 0.0);
    }
    const Ruling r = ruling_of(flavor);
    // The scaled ruling depends on the state coordinate only, so no chart guard applies.
    const Vec3 w = ruling_direction(family, z, p, r, 0.0);
    const Vec3 dw = ruling_direction_derivative(family, z, p, r);
    const Vec3 arm = anchor - x00;
    return {w.cross(arm), dw.cross(arm) + w.cross(anchor_d), flavor};
}

MPolynomial m_polynomial(const ConfocalFamily& family, double z, double u0, double v0,
                         MFamily flavor)
{
    const Vec3 m0 = m_field_at_state(family, z, u0, v0, 0.0, flavor).m;
    const Vec3 mp = m_field_at_state(family, z, u0, v0, 1.0, flavor).m;
    const Vec3 mm = m_field_at_state(family, z, u0, v0, -1.0, flavor).m;
    return {m0, 0.5 * (mp - mm), 0.5 * (mp + mm) - m0};
}

double reflection_residual(const TangencyConfig& config)
{
    const MField mf = m_field(config, MFamily::M);
    const Vec3 xv = eval(config.family, config.z, config.p1).x_v;
    const double value = xv.dot(reflection_matrix(config.normal00) * mf.m);
    return safe_ratio(std::abs(value), xv.norm() * mf.m.norm());
}

double factorization_lhs(const TangencyConfig& config)
{
    const JetPoint jz = eval(config.family, config.z, config.p1);
    const Vec3& n = config.normal00;
    return 4.0 * jz.x_u.dot(n) * n.dot(jz.x_v);
}

double factorization_residual(const TangencyConfig& config)
{
    const JetPoint jz = eval(config.family, config.z, config.p1);
    const Vec3& n = config.normal00;
    double lhs, rhs;
    switch (config.p1.chart) {
    case Chart::Finite:
        lhs = 4.0 * jz.x_u.dot(n) * n.dot(jz.x_v);
        rhs = -4.0 * config.z / config.b1;
        break;
    case Chart::UAtInfinity: {
        // Both sides vanish like 1/B; compare B-scaled versions.
        const Vec3 w = ruling_direction(config.family, config.z, config.p1, Ruling::U);
        lhs = 4.0 * w.dot(n) * n.dot(jz.x_v);
        rhs = -4.0 * config.z;
        break;
    }
    case Chart::VAtInfinity: {
        const Vec3 w = ruling_direction(config.family, config.z, config.p1, Ruling::V);
        lhs = 4.0 * jz.x_u.dot(n) * n.dot(w);
        rhs = -4.0 * config.z;
        break;
    }
    }
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

double integrability_residual(const TangencyConfig& config, MFamily family, const Vec3& normal)
{
    const MField mf = m_field(config, family);
    const double value = normal.dot(2.0 * config.z * mf.m + mf.m.cross(mf.m_var));
    const double scale = 2.0 * std::abs(config.z) * mf.m.norm() + mf.m.norm() * mf.m_var.norm();
    return safe_ratio(std::abs(value), scale);
}

double integrability_residual(const TangencyConfig& config, MFamily family)
{
    return integrability_residual(config, family, config.normal00);
}

} // namespace bianchi
