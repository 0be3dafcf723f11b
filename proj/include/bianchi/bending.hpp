#pragma once

#include <array>
#include <vector>

#include "bianchi/expression.hpp"
#include "bianchi/surface.hpp"

namespace bianchi {

/// Bending of the z = 0 quadric as a ruled surface x0 = c(v) + rho e1(v),
/// with rulings the u-lines, directrix c(v) = x0(u_ref, v) and e1 the unit
/// u-ruling. The bent ruling field keeps the speed of e1 on the sphere and
/// takes the geodesic curvature `kappa(v, kappa_base)`; the directrix
/// velocity keeps its components in the frame, the third one times `sigma`.
struct RuledBendingSpec {
    ConfocalFamily family;
    double u_ref = 0.0;
    Expression kappa = Expression::parse("kappa");
    int sigma = 1;
    double v_min = 0.0, v_max = 1.0;
    /// Fixed RK4 step along v.
    double step = 1e-3;
};

/// Spherical frame (e1, e2, e3) of the base rulings and its invariants at v.
struct RulingFrame {
    std::array<Vec3, 3> e;
    std::array<Vec3, 3> de;
    double speed = 0.0;     // |e1'|
    double curvature = 0.0; // geodesic curvature of e1 on the sphere
};

RulingFrame base_frame(const ConfocalFamily& family, double v);

class BentSurface : public Surface {
public:
    /// Integrates the bent frame and directrix over [v_min, v_max] (slightly padded).
    explicit BentSurface(RuledBendingSpec spec);

    SurfaceJet jet(double u, double v) const override;
    std::string provenance() const override { return "bent"; }

    const RuledBendingSpec& spec() const { return spec_; }
    /// Largest |F^T F - I| seen before re-orthonormalization.
    double frame_drift() const { return drift_; }
    /// Bent frame at v.
    std::array<Vec3, 3> frame(double v) const;

private:
    using State = std::array<Vec3, 4>; // e1, e2, e3, c

    State rhs(double v, const State& s) const;
    State step(double v, const State& s, double h) const;
    State state_at(double v) const;

    RuledBendingSpec spec_;
    double v0_ = 0.0, h_ = 0.0;
    std::vector<State> knots_;
    double drift_ = 0.0;
};

SurfacePatch bend(const RuledBendingSpec& spec, const Grid2D& grid);

/// max over nodes and (E, F, G) of the first-form difference.
double isometry_residual(const SurfacePatch& base, const SurfacePatch& bent);

} // namespace bianchi
