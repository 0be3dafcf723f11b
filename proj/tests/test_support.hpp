#pragma once

#include <algorithm>
#include <cmath>

#include "bianchi/confocal.hpp"

namespace bianchi::testing {

inline bool near(const Vec3& a, const Vec3& b, double tol)
{
    return (a - b).cwiseAbs().maxCoeff() <= tol * std::max(1.0, b.cwiseAbs().maxCoeff());
}

/// Largest deviation between analytic partials and central differences with step h.
inline double fd_jet_error(const ConfocalFamily& f, double z, const ParamPoint& p, double h)
{
    auto at = [&](double du, double dv) { return eval(f, z, ParamPoint::finite(p.u + du, p.v + dv)); };
    const JetPoint j = at(0, 0);
    const JetPoint up = at(h, 0), um = at(-h, 0), vp = at(0, h), vm = at(0, -h);
    double err = 0.0;
    auto acc = [&](const Vec3& analytic, const Vec3& fd) { err = std::max(err, (analytic - fd).norm()); };
    acc(j.x_u, (up.x - um.x) / (2 * h));
    acc(j.x_v, (vp.x - vm.x) / (2 * h));
    acc(j.x_uu, (up.x_u - um.x_u) / (2 * h));
    acc(j.x_uv, (vp.x_u - vm.x_u) / (2 * h));
    acc(j.x_vv, (vp.x_v - vm.x_v) / (2 * h));
    return err;
}

} // namespace bianchi::testing
