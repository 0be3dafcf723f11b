#pragma once

#include "bianchi/confocal.hpp"

namespace bianchi {

/// Rigid motion x -> R x + t of O(3) x R^3.
struct RigidMotion {
    Mat3 R = Mat3::Identity();
    Vec3 t = Vec3::Zero();
    int det_sign = 1;

    Vec3 apply(const Vec3& x) const { return R * x + t; }
    Vec3 rotate(const Vec3& w) const { return R * w; }
    RigidMotion inverse() const { return {R.transpose(), -(R.transpose() * t), det_sign}; }
    RigidMotion compose(const RigidMotion& inner) const
    {
        return {R * inner.R, R * inner.t + t, det_sign * inner.det_sign};
    }
    static RigidMotion identity() { return {}; }
};

/// Closest orthogonal matrix in the Frobenius norm (polar factor).
Mat3 polar_orthogonal(const Mat3& m);

/// Two parameter points on x_0 together with their Ivory images on x_z.
struct PointPair {
    ConfocalFamily family;
    double z;
    ParamPoint p0, p1;
    Vec3 x00, x01; // x_0(p0), x_0(p1)
    Vec3 xz0, xz1; // x_z(p0), x_z(p1)
    Vec3 V01;      // x_z^1 - x_0^0
    Vec3 V10;      // x_z^0 - x_0^1

    static PointPair make(const ConfocalFamily& family, double z, const ParamPoint& p0,
                          const ParamPoint& p1);
};

/// Ruling quadruple (w_0^0, w_z^0, w_0^1, w_z^1) for the chosen families.
struct RulingQuad {
    Vec3 w00, wz0, w01, wz1;
};
RulingQuad rulings(const PointPair& pair, Ruling fam0, Ruling fam1);

/// Ivory: |V01|^2 = middle closed form = |V10|^2, scaled by the magnitudes involved.
double ivory_length_residual(const PointPair& pair);
/// |w_z|^2 - |w_0|^2 relative, for a ruling at p0.
double ruling_length_residual(const PointPair& pair, Ruling fam);
double segment_ruling_angle_residual(const PointPair& pair, Ruling fam);
double ruling_angle_residual(const PointPair& pair, Ruling fam0, Ruling fam1);
double tangency_symmetry_residual(const PointPair& pair);
/// max |G1 - G2| for the Gram matrices of [V01 w00 wz1] and [-V10 wz0 w01],
/// relative to the largest Gram entry.
double gram_residual(const PointPair& pair, Ruling fam0, Ruling fam1);
/// Condition number of the column-normalized frame [V01 w00 wz1].
double frame_condition(const PointPair& pair, Ruling fam0, Ruling fam1);

inline constexpr double kMaxFrameCondition = 1e8;

/// Motion with (R,t)(x00, xz1, w00, wz1) = (xz0, x01, wz0, w01).
RigidMotion build_ivory_motion(const PointPair& pair, Ruling fam0, Ruling fam1,
                               double max_condition = kMaxFrameCondition);

/// Largest mismatch of the four mapped items, relative to their magnitudes.
double ivory_motion_residual(const RigidMotion& motion, const PointPair& pair, Ruling fam0,
                             Ruling fam1);

double orthogonality_defect(const Mat3& R);

} // namespace bianchi
