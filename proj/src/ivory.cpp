#include "bianchi/ivory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bianchi {

Mat3 polar_orthogonal(const Mat3& m)
{
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

double orthogonality_defect(const Mat3& R)
{
    return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
}

PointPair PointPair::make(const ConfocalFamily& family, double z, const ParamPoint& p0,
                          const ParamPoint& p1)
{
    family.require_admissible(z);
    PointPair pair{family, z, p0, p1, {}, {}, {}, {}, {}, {}};
    pair.x00 = eval(family, 0.0, p0).x;
    pair.x01 = eval(family, 0.0, p1).x;
    pair.xz0 = ivory_map(family, z, pair.x00);
    pair.xz1 = ivory_map(family, z, pair.x01);
    pair.V01 = pair.xz1 - pair.x00;
    pair.V10 = pair.xz0 - pair.x01;
    return pair;
}

RulingQuad rulings(const PointPair& pair, Ruling fam0, Ruling fam1)
{
    RulingQuad q;
    q.w00 = ruling_direction(pair.family, 0.0, pair.p0, fam0);
    q.wz0 = ivory_ruling(pair.family, pair.z, q.w00);
    q.w01 = ruling_direction(pair.family, 0.0, pair.p1, fam1);
    q.wz1 = ivory_ruling(pair.family, pair.z, q.w01);
    return q;
}

double ivory_length_residual(const PointPair& pair)
{
    const Vec3 sq = pair.family.sqrt_rz(pair.z);
    const Vec3 cz = pair.family.ivory_offset(pair.z);
    const double lhs = pair.V01.squaredNorm();
    const double rhs = pair.V10.squaredNorm();
    const double middle = (pair.x00 + pair.x01 - cz).squaredNorm() -
                          2.0 * pair.x00.dot((Vec3::Ones() + sq).cwiseProduct(pair.x01)) +
                          pair.z * pair.family.C();
    const double mag = pair.x00.norm() + pair.x01.norm() + cz.norm();
    const double scale = mag * mag + std::abs(pair.z * pair.family.C()) +
                         std::numeric_limits<double>::min();
    return std::max({std::abs(lhs - rhs), std::abs(lhs - middle), std::abs(rhs - middle)}) / scale;
}

double ruling_length_residual(const PointPair& pair, Ruling fam)
{
    const Vec3 w0 = ruling_direction(pair.family, 0.0, pair.p0, fam);
    const Vec3 wz = ivory_ruling(pair.family, pair.z, w0);
    return safe_ratio(std::abs(wz.squaredNorm() - w0.squaredNorm()), w0.squaredNorm());
}

double segment_ruling_angle_residual(const PointPair& pair, Ruling fam)
{
    const Vec3 w00 = ruling_direction(pair.family, 0.0, pair.p0, fam);
    const Vec3 wz0 = ivory_ruling(pair.family, pair.z, w00);
    const double value = pair.V01.dot(w00) + pair.V10.dot(wz0);
    const double scale = pair.V01.norm() * w00.norm() + pair.V10.norm() * wz0.norm();
    return safe_ratio(std::abs(value), scale);
}

double ruling_angle_residual(const PointPair& pair, Ruling fam0, Ruling fam1)
{
    const RulingQuad q = rulings(pair, fam0, fam1);
    const double lhs = q.w00.dot(q.wz1);
    const double rhs = q.wz0.dot(q.w01);
    const double scale = q.w00.norm() * q.wz1.norm() + q.wz0.norm() * q.w01.norm();
    return safe_ratio(std::abs(lhs - rhs), scale);
}

double tangency_symmetry_residual(const PointPair& pair)
{
    const Vec3 n00 = eval(pair.family, 0.0, pair.p0).scaled_normal;
    const Vec3 n01 = eval(pair.family, 0.0, pair.p1).scaled_normal;
    const double lhs = pair.V01.dot(n00);
    const double rhs = pair.V10.dot(n01);
    const double scale = pair.V01.norm() * n00.norm() + pair.V10.norm() * n01.norm();
    return safe_ratio(std::abs(lhs - rhs), scale);
}

namespace {

struct Frames {
    Mat3 src, tgt;
};

Frames frames(const PointPair& pair, Ruling fam0, Ruling fam1)
{
    const RulingQuad q = rulings(pair, fam0, fam1);
    Frames f;
    f.src.col(0) = pair.V01;
    f.src.col(1) = q.w00;
    f.src.col(2) = q.wz1;
    f.tgt.col(0) = -pair.V10;
    f.tgt.col(1) = q.wz0;
    f.tgt.col(2) = q.w01;
    return f;
}

double condition_number(const Mat3& m)
{
    Eigen::JacobiSVD<Mat3> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(2) <= 0.0)
        return std::numeric_limits<double>::infinity();
    return sv(0) / sv(2);
}

// Scales columns of both frames by the source column norms; returns false
// when a source column vanishes.
bool normalize_columns(Mat3& src, Mat3& tgt)
{
    for (int c = 0; c < 3; ++c) {
        const double n = src.col(c).norm();
        if (!(n > 0.0))
            return false;
        src.col(c) /= n;
        tgt.col(c) /= n;
    }
    return true;
}

} // namespace

double gram_residual(const PointPair& pair, Ruling fam0, Ruling fam1)
{
    const Frames f = frames(pair, fam0, fam1);
    const Mat3 g1 = f.src.transpose() * f.src;
    const Mat3 g2 = f.tgt.transpose() * f.tgt;
    const double scale = std::max(g1.cwiseAbs().maxCoeff(), g2.cwiseAbs().maxCoeff());
    return safe_ratio((g1 - g2).cwiseAbs().maxCoeff(), scale);
}

double frame_condition(const PointPair& pair, Ruling fam0, Ruling fam1)
{
    Frames f = frames(pair, fam0, fam1);
    if (!normalize_columns(f.src, f.tgt))
        return std::numeric_limits<double>::infinity();
    return condition_number(f.src);
}

RigidMotion build_ivory_motion(const PointPair& pair, Ruling fam0, Ruling fam1,
                               double max_condition)
{
    Frames f = frames(pair, fam0, fam1);
    const double scale = std::max(f.src.cwiseAbs().maxCoeff(), 1.0);

    Mat3 R;
    if ((f.src - f.tgt).cwiseAbs().maxCoeff() <= 1e-15 * scale) {
        // z = 0: source and target frames coincide.
        R = Mat3::Identity();
    } else {
        Mat3 src = f.src;
        Mat3 tgt = f.tgt;
        bool ok = normalize_columns(src, tgt) && condition_number(src) <= max_condition;
        if (!ok && pair.V01.norm() <= 1e-12 * scale && pair.V10.norm() <= 1e-12 * scale) {
            // Coincident points: complete the two rulings by their cross product.
            src.col(0) = f.src.col(1);
            src.col(1) = f.src.col(2);
            src.col(2) = f.src.col(1).cross(f.src.col(2));
            tgt.col(0) = f.tgt.col(1);
            tgt.col(1) = f.tgt.col(2);
            tgt.col(2) = f.tgt.col(1).cross(f.tgt.col(2));
            ok = normalize_columns(src, tgt) && condition_number(src) <= max_condition;
        }
        if (!ok)
            throw DegenerateFrameError("frame [V01 w00 wz1] is numerically dependent (condition " +
                                       std::to_string(frame_condition(pair, fam0, fam1)) + ")");
        R = polar_orthogonal(tgt * src.inverse());
    }

    RigidMotion motion;
    motion.R = R;
    motion.det_sign = R.determinant() > 0.0 ? 1 : -1;
    motion.t = pair.xz0 - R * pair.x00;
    return motion;
}

double ivory_motion_residual(const RigidMotion& motion, const PointPair& pair, Ruling fam0,
                             Ruling fam1)
{
    const RulingQuad q = rulings(pair, fam0, fam1);
    auto rel = [](const Vec3& got, const Vec3& want) {
        return (got - want).norm() / std::max(1.0, want.norm());
    };
    return std::max({rel(motion.apply(pair.x00), pair.xz0), rel(motion.apply(pair.xz1), pair.x01),
                     rel(motion.rotate(q.w00), q.wz0), rel(motion.rotate(q.wz1), q.w01)});
}

} // namespace bianchi
