#include "bianchi/surface.hpp"

#include <cmath>

namespace bianchi {

Grid2D Grid2D::make(double u_min, double u_max, double v_min, double v_max, int nu, int nv)
{
    if (nu < 3 || nv < 3)
        throw DomainError("grid needs at least 3 nodes per axis");
    if (!(u_max > u_min) || !(v_max > v_min))
        throw DomainError("grid ranges must have positive length");
    return {u_min, u_max, v_min, v_max, nu, nv};
}

SurfaceJet QuadricSurface::jet(double u, double v) const
{
    return eval(family_, 0.0, ParamPoint::finite(u, v));
}

SurfaceJet RigidSurface::jet(double u, double v) const
{
    const SurfaceJet b = base_->jet(u, v);
    SurfaceJet j;
    j.x = motion_.apply(b.x);
    j.x_u = motion_.R * b.x_u;
    j.x_v = motion_.R * b.x_v;
    j.x_uu = motion_.R * b.x_uu;
    j.x_uv = motion_.R * b.x_uv;
    j.x_vv = motion_.R * b.x_vv;
    return j;
}

SurfacePatch sample(const Surface& surface, const Grid2D& grid)
{
    SurfacePatch patch{grid, {}, surface.provenance()};
    patch.jets.resize(grid.size());
    for (int j = 0; j < grid.nv; ++j)
        for (int i = 0; i < grid.nu; ++i) {
            SurfaceJet jet = surface.jet(grid.u(i), grid.v(j));
            if (!(jet.cross_normal().norm() >= kImmersionFloor))
                throw ImmersionError("surface is not immersed at node (" + std::to_string(i) + ", " +
                                     std::to_string(j) + ")");
            patch.jets[grid.index(i, j)] = jet;
        }
    return patch;
}

} // namespace bianchi
