#pragma once

#include <utility>
#include <vector>

#include "bianchi/ivory.hpp"
#include "bianchi/surface.hpp"

namespace bianchi {

/// Rolling of the quadric x0 onto an isometric seed x at one parameter point:
/// R = [x_u x_v eps N][x0_u x0_v N0]^-1, t = x - R x0, and the connection
/// coefficients omega0 = P du + Q dv from the jets.
struct RollingJet {
    RigidMotion motion;
    Vec3 P = Vec3::Zero();
    Vec3 Q = Vec3::Zero();
};

/// Relative first-form mismatch tolerated before the pair is declared non-isometric.
inline constexpr double kIsometryTolerance = 1e-6;

double first_form_mismatch(const SurfaceJet& quadric, const SurfaceJet& seed);

/// Pointwise rolling with analytic connection coefficients.
RollingJet roll(const SurfaceJet& quadric, const SurfaceJet& seed, int epsilon);

struct RollingField {
    Grid2D grid;
    int epsilon = 1;
    std::vector<RigidMotion> motions;

    const RigidMotion& at(int i, int j) const { return motions[grid.index(i, j)]; }
};

RollingField rolling_field(const SurfacePatch& quadric, const SurfacePatch& seed, int epsilon);

/// max over nodes of |x_u - R x0_u| and |x_v - R x0_v|, relative to the partials.
double rolling_residual(const RollingField& field, const SurfacePatch& quadric,
                        const SurfacePatch& seed);
/// max over nodes of |N - det(R) R N0|.
double normal_transport_residual(const RollingField& field, const SurfacePatch& quadric,
                                 const SurfacePatch& seed);

struct ConnectionForm {
    Grid2D grid;
    std::vector<Vec3> P, Q;
    /// Largest |R^T dR a - omega x a| over nodes and unit a (discretization indicator).
    double reconstruction_error = 0.0;

    const Vec3& P_at(int i, int j) const { return P[grid.index(i, j)]; }
    const Vec3& Q_at(int i, int j) const { return Q[grid.index(i, j)]; }
};

inline constexpr double kMaxReconstructionError = 1e-4;

/// omega0 = N0 x R^-1 dR N0 with dR from central differences (one-sided at the border).
ConnectionForm connection_form(const RollingField& field, const SurfacePatch& quadric,
                               double max_reconstruction_error = kMaxReconstructionError);
/// Same form from the jets; no discretization error.
ConnectionForm analytic_connection_form(const SurfacePatch& quadric, const SurfacePatch& seed,
                                        int epsilon);

/// Largest normal component |N0.P|, |N0.Q| relative to |P|, |Q|.
double tangential_defect(const ConnectionForm& omega, const SurfacePatch& quadric);

/// Cell residuals of d omega + 1/2 omega x omega and omega x dx0, as du dv coefficients.
/// Cells touching the grid border are skipped: one-sided stencils make the
/// discretization error non-smooth there.
std::pair<double, double> flatness_residual(const ConnectionForm& omega, const SurfacePatch& quadric);

/// (a.P)(b.Q) - (a.Q)(b.P) against (a x b).(P x Q), relative to |a||b||P||Q|.
double wedge_identity_residual(const Vec3& a, const Vec3& b, const Vec3& P, const Vec3& Q);

} // namespace bianchi
