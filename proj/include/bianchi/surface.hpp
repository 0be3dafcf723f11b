#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bianchi/confocal.hpp"
#include "bianchi/ivory.hpp"

namespace bianchi {

/// Rectangular parameter grid, node (i, j) at (u_min + i h_u, v_min + j h_v).
struct Grid2D {
    double u_min = 0.0, u_max = 1.0;
    double v_min = 0.0, v_max = 1.0;
    int nu = 3, nv = 3;

    static Grid2D make(double u_min, double u_max, double v_min, double v_max, int nu, int nv);

    double hu() const { return (u_max - u_min) / (nu - 1); }
    double hv() const { return (v_max - v_min) / (nv - 1); }
    double u(int i) const { return u_min + i * hu(); }
    double v(int j) const { return v_min + j * hv(); }
    int size() const { return nu * nv; }
    int index(int i, int j) const { return j * nu + i; }
    /// Same box with twice the resolution.
    Grid2D refined() const { return make(u_min, u_max, v_min, v_max, 2 * nu - 1, 2 * nv - 1); }
};

/// A parametrized surface with closed-form second-order jets.
class Surface {
public:
    virtual ~Surface() = default;
    virtual SurfaceJet jet(double u, double v) const = 0;
    virtual std::string provenance() const = 0;
};

/// The z = 0 member of a confocal family.
class QuadricSurface : public Surface {
public:
    explicit QuadricSurface(ConfocalFamily family) : family_(family) {}
    SurfaceJet jet(double u, double v) const override;
    std::string provenance() const override { return "quadric"; }
    const ConfocalFamily& family() const { return family_; }

private:
    ConfocalFamily family_;
};

/// A fixed rigid motion applied to another surface.
class RigidSurface : public Surface {
public:
    RigidSurface(std::shared_ptr<const Surface> base, RigidMotion motion)
        : base_(std::move(base)), motion_(motion) {}
    SurfaceJet jet(double u, double v) const override;
    std::string provenance() const override { return "rigid"; }
    const RigidMotion& motion() const { return motion_; }

private:
    std::shared_ptr<const Surface> base_;
    RigidMotion motion_;
};

inline constexpr double kImmersionFloor = 1e-8;

/// Jets sampled on a grid.
struct SurfacePatch {
    Grid2D grid;
    std::vector<SurfaceJet> jets;
    std::string provenance;

    const SurfaceJet& at(int i, int j) const { return jets[grid.index(i, j)]; }
};

/// Samples `surface` on `grid`; throws ImmersionError where |x_u x x_v| < kImmersionFloor.
SurfacePatch sample(const Surface& surface, const Grid2D& grid);

} // namespace bianchi
