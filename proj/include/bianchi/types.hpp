#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bianchi {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

// Error hierarchy. Every library failure derives from Error so the CLI can
// map categories onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error { using Error::Error; };
class KindError : public Error { using Error::Error; };
class DegenerateFrameError : public Error { using Error::Error; };
class NoSolutionError : public Error { using Error::Error; };
class NotIsometricError : public Error { using Error::Error; };
class ImmersionError : public Error { using Error::Error; };
class GridTooCoarseError : public Error { using Error::Error; };
class ValidityError : public Error { using Error::Error; };
class QuadratureError : public Error { using Error::Error; };
class SpectralZeroError : public Error { using Error::Error; };
class BlowupError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

/// Skew matrix of `a`, so that skew(a) * b == a.cross(b).
inline Mat3 skew(const Vec3& a)
{
    Mat3 m;
    m << 0.0, -a.z(), a.y(),
         a.z(), 0.0, -a.x(),
        -a.y(), a.x(), 0.0;
    return m;
}

/// Axial vector of the skew-symmetric part of `m`.
inline Vec3 axial(const Mat3& m)
{
    return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

inline double safe_ratio(double num, double den)
{
    return den > 0.0 ? num / den : num;
}

} // namespace bianchi
