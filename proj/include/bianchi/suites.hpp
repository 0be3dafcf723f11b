#pragma once

#include <cstdint>

#include "bianchi/confocal.hpp"

namespace bianchi {

// Randomized sweeps over admissible configurations of one quadric kind. Every
// field is the worst case over the sweep; the control_* fields are the smallest
// residual seen on the perturbed negative controls.
struct IdentitySuite {
    QuadricKind kind = QuadricKind::HyperboloidOneSheet;
    int samples = 0;

    double ivory_length = 0.0;
    double ruling_length = 0.0;
    double segment_ruling_angle = 0.0;
    double ruling_angle = 0.0;
    double tangency_symmetry = 0.0;
    double gram = 0.0;

    int motions = 0;
    int motions_skipped = 0;       // frame condition above the build threshold
    double motion_map = 0.0;
    double motion_orthogonality = 0.0;
    int flips = 0;
    int flips_skipped = 0;
    double motion_flip = 0.0;

    int solved = 0;
    double reflection = 0.0;
    double factorization = 0.0;
    double integrability = 0.0;
    int controls = 0;
    double control_reflection = 0.0;
    double control_factorization = 0.0;
    double control_integrability = 0.0;

    int wedges = 0;
    double wedge = 0.0;
};

/// Frame condition above which a motion is not built in the sweep. The motion
/// error grows like condition times rounding; 1e4 keeps it near 1e-10.
inline constexpr double kSweepFrameCondition = 1e4;
/// Negative controls only use partners with |u1| up to this.
inline constexpr double kControlPartner = 10.0;

IdentitySuite run_identity_suite(QuadricKind kind, int samples, std::uint64_t seed);

} // namespace bianchi
