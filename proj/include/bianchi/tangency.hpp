#pragma once

#include "bianchi/confocal.hpp"

namespace bianchi {

/// Which facet distribution: M uses the u-ruling of x_z^1 and carries v1 as the
/// Riccati state, MPrime uses the v-ruling and carries u1.
enum class MFamily { M, MPrime };

inline Ruling ruling_of(MFamily f) { return f == MFamily::M ? Ruling::U : Ruling::V; }

/// (u0, v0) on x_0 with a partner point p1 on x_z. Built either freely or by
/// solving the tangency relation (V01)^T N^0_0 = 0.
struct TangencyConfig {
    ConfocalFamily family;
    double z = 0.0;
    double u0 = 0.0, v0 = 0.0;
    ParamPoint p1;
    /// Set when every partner on the ruling satisfies the relation (p1 is a representative).
    bool free_ruling = false;

    Vec3 x00 = Vec3::Zero();
    Vec3 V01 = Vec3::Zero();
    Vec3 scaled_normal00 = Vec3::Zero();
    Vec3 normal00 = Vec3::Zero();
    double b1 = 1.0;

    double u1() const { return p1.u; }
    double v1() const { return p1.v; }
    /// Riccati state for the given flavor (v1 for M, u1 for MPrime).
    double state(MFamily f) const { return f == MFamily::M ? p1.v : p1.u; }
};

TangencyConfig make_config(const ConfocalFamily& family, double z, double u0, double v0,
                           const ParamPoint& p1);

/// Relative coefficient size below which the partner is routed to an infinity chart.
inline constexpr double kInfinityRouting = 1e-12;

/// Solves the tangency relation for u1 given (u0, v0, v1).
TangencyConfig solve_tangency(const ConfocalFamily& family, double z, double u0, double v0,
                              double v1);
/// Mirrored solve for v1 given (u0, v0, u1).
TangencyConfig solve_tangency_for_v1(const ConfocalFamily& family, double z, double u0,
                                     double v0, double u1);
/// Dispatches on the flavor's state variable.
TangencyConfig solve_for_state(const ConfocalFamily& family, double z, double u0, double v0,
                               double state, MFamily flavor);

/// |V01 . N^00| / (|V01| |N^00|).
double tangency_residual(const TangencyConfig& config);

/// Tangency relation with denominators cleared; affine in each of u0, v0, u1, v1.
double tangency_polynomial(const ConfocalFamily& family, double z, double u0, double v0,
                           double u1, double v1);

struct MField {
    Vec3 m = Vec3::Zero();
    /// Derivative in the flavor's state variable (v1 for M, u1 for MPrime).
    Vec3 m_var = Vec3::Zero();
    MFamily family = MFamily::M;
};

/// m = B1 x_{z,u1} x V01 (or B1 x_{z,v1} x V01), evaluated at the config's partner.
MField m_field(const TangencyConfig& config, MFamily family);

/// Partner-free closed form of the m-field as a function of the state variable.
MField m_field_at_state(const ConfocalFamily& family, double z, double u0, double v0,
                        double state, MFamily flavor);

/// m(s) = c0 + c1 s + c2 s^2.
struct MPolynomial {
    Vec3 c0, c1, c2;
    Vec3 at(double s) const { return c0 + s * (c1 + s * c2); }
};
MPolynomial m_polynomial(const ConfocalFamily& family, double z, double u0, double v0,
                         MFamily flavor);

/// Reflection of the two facets in T_{x_0^0}: x_{z,v1}^T (I - 2 N N^T) m, normalized.
double reflection_residual(const TangencyConfig& config);

/// |4 (x_{z,u1}.N)(N.x_{z,v1}) + 4z/B1| / max(|lhs|, |rhs|, 1).
double factorization_residual(const TangencyConfig& config);
/// Signed left side 4 (x_{z,u1}.N)(N.x_{z,v1}) on a finite partner.
double factorization_lhs(const TangencyConfig& config);

/// N^T (2z m + m x m_var), normalized by 2|z||m| + |m||m_var|.
double integrability_residual(const TangencyConfig& config, MFamily family);
double integrability_residual(const TangencyConfig& config, MFamily family, const Vec3& normal);

/// I - 2 n n^T for a unit n.
inline Mat3 reflection_matrix(const Vec3& n)
{
    return Mat3::Identity() - 2.0 * n * n.transpose();
}

} // namespace bianchi
