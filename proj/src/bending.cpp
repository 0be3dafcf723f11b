#include "bianchi/bending.hpp"

#include <algorithm>
#include <cmath>

#include "bianchi/ivory.hpp"

namespace bianchi {

RulingFrame base_frame(const ConfocalFamily& family, double v)
{
    const ParamPoint p = ParamPoint::finite(0.0, v);
    const Vec3 g = ruling_direction(family, 0.0, p, Ruling::U, 0.0);
    const Vec3 dg = ruling_direction_derivative(family, 0.0, p, Ruling::U);
    const Vec3 ddg = ruling_direction_second_derivative(family, 0.0, Ruling::U);
    const double gn = g.norm();
    const Vec3 gx = g.cross(dg);
    const double gxn = gx.norm();
    if (!(gxn > 0.0))
        throw ValidityError("ruling direction is stationary; no spherical frame");

    RulingFrame f;
    f.speed = gxn / (gn * gn);
    f.curvature = g.cross(dg).dot(ddg) * gn * gn * gn / (gxn * gxn * gxn);
    f.e[0] = g / gn;
    f.e[1] = (dg - f.e[0] * f.e[0].dot(dg)) / gn / f.speed;
    f.e[2] = f.e[0].cross(f.e[1]);
    f.de[0] = f.speed * f.e[1];
    f.de[1] = -f.speed * f.e[0] + f.speed * f.curvature * f.e[2];
    f.de[2] = -f.speed * f.curvature * f.e[1];
    return f;
}

namespace {

std::array<Vec3, 4> axpy(double a, const std::array<Vec3, 4>& x, const std::array<Vec3, 4>& y)
{
    return {y[0] + a * x[0], y[1] + a * x[1], y[2] + a * x[2], y[3] + a * x[3]};
}

} // namespace

BentSurface::BentSurface(RuledBendingSpec spec) : spec_(std::move(spec))
{
    if (spec_.sigma != 1 && spec_.sigma != -1)
        throw ValidityError("bending branch sigma must be +1 or -1");
    if (!(spec_.v_max > spec_.v_min) || !(spec_.step > 0.0))
        throw ValidityError("empty bending range");
    const double span = spec_.v_max - spec_.v_min;
    const double lo = spec_.v_min - 0.02 * span, hi = spec_.v_max + 0.02 * span;
    if (spec_.family.is_hyperboloid() && spec_.u_ref > lo - 1e-6 && spec_.u_ref < hi + 1e-6)
        throw ValidityError("directrix u_ref lies inside the v-range (chart singularity u = v)");

    const int n = std::max(16, static_cast<int>(std::ceil((hi - lo) / spec_.step)));
    v0_ = lo;
    h_ = (hi - lo) / n;

    const RulingFrame f0 = base_frame(spec_.family, lo);
    State s{f0.e[0], f0.e[1], f0.e[2], eval(spec_.family, 0.0, ParamPoint::finite(spec_.u_ref, lo)).x};
    knots_.reserve(n + 1);
    knots_.push_back(s);
    for (int k = 0; k < n; ++k) {
        s = step(v0_ + k * h_, s, h_);
        Mat3 F;
        F << s[0], s[1], s[2];
        drift_ = std::max(drift_, orthogonality_defect(F));
        if (!std::isfinite(F.sum()) || !std::isfinite(s[3].sum()))
            throw QuadratureError("bent frame integration produced non-finite values");
        const Mat3 Q = polar_orthogonal(F);
        s[0] = Q.col(0);
        s[1] = Q.col(1);
        s[2] = Q.col(2);
        knots_.push_back(s);
    }
    if (drift_ > 1e-10)
        throw QuadratureError("frame drift " + std::to_string(drift_) + " exceeds 1e-10; reduce the step");
}

BentSurface::State BentSurface::rhs(double v, const State& s) const
{
    const RulingFrame f = base_frame(spec_.family, v);
    const double lam = f.speed;
    const double kap = spec_.kappa(v, f.curvature);
    const Vec3 dc = eval(spec_.family, 0.0, ParamPoint::finite(spec_.u_ref, v)).x_v;
    const double b1 = dc.dot(f.e[0]), b2 = dc.dot(f.e[1]), b3 = dc.dot(f.e[2]);
    if (!(b3 * b3 > 1e-14 * dc.squaredNorm()))
        throw ValidityError("bending component vanishes at v = " + std::to_string(v));
    return {lam * s[1], -lam * s[0] + lam * kap * s[2], -lam * kap * s[1],
            b1 * s[0] + b2 * s[1] + spec_.sigma * b3 * s[2]};
}

BentSurface::State BentSurface::step(double v, const State& s, double h) const
{
    const State k1 = rhs(v, s);
    const State k2 = rhs(v + 0.5 * h, axpy(0.5 * h, k1, s));
    const State k3 = rhs(v + 0.5 * h, axpy(0.5 * h, k2, s));
    const State k4 = rhs(v + h, axpy(h, k3, s));
    State out;
    for (int i = 0; i < 4; ++i)
        out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

BentSurface::State BentSurface::state_at(double v) const
{
    const double t = (v - v0_) / h_;
    const int k = std::clamp(static_cast<int>(std::lround(t)), 0, static_cast<int>(knots_.size()) - 1);
    if (std::abs(t - k) > 2.0)
        throw DomainError("v = " + std::to_string(v) + " outside the bent range");
    const double vk = v0_ + k * h_;
    return v == vk ? knots_[k] : step(vk, knots_[k], v - vk);
}

std::array<Vec3, 3> BentSurface::frame(double v) const
{
    const State s = state_at(v);
    return {s[0], s[1], s[2]};
}

SurfaceJet BentSurface::jet(double u, double v) const
{
    const JetPoint b = eval(spec_.family, 0.0, ParamPoint::finite(u, v));
    const RulingFrame f = base_frame(spec_.family, v);
    const State s = state_at(v);
    const State ds = rhs(v, s);
    const Vec3 c = eval(spec_.family, 0.0, ParamPoint::finite(spec_.u_ref, v)).x;
    const double sg = spec_.sigma;

    // components in the base frame, third one mirrored by the branch sign
    auto comp = [&](const Vec3& w) { return Vec3(w.dot(f.e[0]), w.dot(f.e[1]), sg * w.dot(f.e[2])); };
    auto assemble = [&](const Vec3& a) { return a[0] * s[0] + a[1] * s[1] + a[2] * s[2]; };

    SurfaceJet j;
    j.x = s[3] + (b.x - c).dot(f.e[0]) * s[0];
    j.x_u = assemble(comp(b.x_u));
    j.x_uu = assemble(comp(b.x_uu));
    j.x_uv = assemble(comp(b.x_uv));
    const Vec3 bv = comp(b.x_v);
    j.x_v = assemble(bv);
    const Vec3 dbv(b.x_vv.dot(f.e[0]) + b.x_v.dot(f.de[0]), b.x_vv.dot(f.e[1]) + b.x_v.dot(f.de[1]),
                   sg * (b.x_vv.dot(f.e[2]) + b.x_v.dot(f.de[2])));
    j.x_vv = assemble(dbv) + bv[0] * ds[0] + bv[1] * ds[1] + bv[2] * ds[2];
    return j;
}

SurfacePatch bend(const RuledBendingSpec& spec, const Grid2D& grid)
{
    RuledBendingSpec s = spec;
    s.v_min = grid.v_min;
    s.v_max = grid.v_max;
    return sample(BentSurface(s), grid);
}

double isometry_residual(const SurfacePatch& base, const SurfacePatch& bent)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < base.jets.size(); ++k)
        worst = std::max(worst, (base.jets[k].first_form() - bent.jets[k].first_form()).cwiseAbs().maxCoeff());
    return worst;
}

} // namespace bianchi
