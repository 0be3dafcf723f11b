#include "bianchi/suites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "bianchi/ivory.hpp"
#include "bianchi/rolling.hpp"
#include "bianchi/sampling.hpp"
#include "bianchi/tangency.hpp"

namespace bianchi {

namespace {

constexpr Ruling kFams[] = {Ruling::U, Ruling::V};

void raise(double& worst, double r) { worst = std::max(worst, r); }
void lower(double& best, double r) { best = std::min(best, r); }

// Finite, moderate partner away from the hyperboloid's diagonal.
bool usable(const TangencyConfig& c)
{
    if (c.p1.chart != Chart::Finite || c.free_ruling || std::abs(c.u1()) > 1e3)
        return false;
    return !c.family.is_hyperboloid() || std::abs(c.u1() - c.v1()) > 1e-3;
}

} // namespace

IdentitySuite run_identity_suite(QuadricKind kind, int samples, std::uint64_t seed)
{
    if (samples < 1)
        throw DomainError("identity suite needs at least one sample");
    IdentitySuite s;
    s.kind = kind;
    s.samples = samples;
    constexpr double inf = std::numeric_limits<double>::infinity();
    s.control_reflection = s.control_factorization = s.control_integrability = inf;

    // separate streams so that changing one sweep leaves the others alone
    Rng rng_static(seed), rng_tangent(seed ^ 0x9e3779b97f4a7c15ull), rng_wedge(seed + 1);

    for (int i = 0; i < samples; ++i) {
        const ConfocalFamily f = random_family(rng_static, kind);
        const double z = random_z(rng_static, f);
        const PointPair pair = PointPair::make(f, z, random_point(rng_static, f), random_point(rng_static, f));
        raise(s.ivory_length, ivory_length_residual(pair));
        raise(s.tangency_symmetry, tangency_symmetry_residual(pair));
        for (Ruling f0 : kFams) {
            raise(s.ruling_length, ruling_length_residual(pair, f0));
            raise(s.segment_ruling_angle, segment_ruling_angle_residual(pair, f0));
            for (Ruling f1 : kFams) {
                raise(s.ruling_angle, ruling_angle_residual(pair, f0, f1));
                raise(s.gram, gram_residual(pair, f0, f1));
                if (frame_condition(pair, f0, f1) > kSweepFrameCondition) {
                    ++s.motions_skipped;
                    continue;
                }
                const RigidMotion m = build_ivory_motion(pair, f0, f1);
                raise(s.motion_map, ivory_motion_residual(m, pair, f0, f1));
                raise(s.motion_orthogonality, orthogonality_defect(m.R));
                ++s.motions;
            }
        }
    }

    for (int i = 0; i < samples; ++i) {
        const ConfocalFamily f = random_family(rng_tangent, kind);
        const double z = random_z(rng_tangent, f);
        const ParamPoint p0 = random_point(rng_tangent, f);
        const double v1 = rng_tangent.uniform(-3.0, 3.0);
        const double kick = rng_tangent.uniform(0.1, 0.3);
        std::optional<TangencyConfig> solved;
        try {
            solved = solve_tangency(f, z, p0.u, p0.v, v1);
        } catch (const NoSolutionError&) {
            continue;
        }
        const TangencyConfig& c = *solved;
        if (!usable(c))
            continue;
        ++s.solved;
        raise(s.reflection, reflection_residual(c));
        raise(s.factorization, factorization_residual(c));
        raise(s.integrability, integrability_residual(c, MFamily::M));
        raise(s.integrability, integrability_residual(c, MFamily::MPrime));

        // Controls. A scalar residual also vanishes on its own hypersurface, so
        // a control is a neighbourhood: the partner moved on a 5x5 stencil
        // around the tangent one, and the normal tilted in eight directions
        // (the integrability relation does not see the partner). Far partners
        // shrink both sides of the factorization below its unit floor and are
        // left out.
        const Vec3 n = c.normal00.normalized();
        if (std::abs(c.u1()) <= kControlPartner) {
            const double su = 3 * kick * std::max(1.0, std::abs(c.u1()));
            const double sv = 3 * kick * std::max(1.0, std::abs(c.v1()));
            double refl = 0, fact = 0, integ = 0;
            for (int k = -2; k <= 2; ++k)
                for (int l = -2; l <= 2; ++l) {
                    const ParamPoint q = ParamPoint::finite(c.u1() + k * su, c.v1() + l * sv);
                    if ((k == 0 && l == 0) || (f.is_hyperboloid() && std::abs(q.u - q.v) < 1e-2))
                        continue;
                    const TangencyConfig off = make_config(f, z, p0.u, p0.v, q);
                    raise(refl, reflection_residual(off));
                    raise(fact, factorization_residual(off));
                }
            const Vec3 t1 = (std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(n).normalized();
            const Vec3 t2 = n.cross(t1);
            for (int k = -1; k <= 1; ++k)
                for (int l = -1; l <= 1; ++l)
                    if (k != 0 || l != 0)
                        raise(integ, integrability_residual(c, MFamily::M, (n + 3 * kick * (k * t1 + l * t2)).normalized()));
            lower(s.control_reflection, refl);
            lower(s.control_factorization, fact);
            lower(s.control_integrability, integ);
            ++s.controls;
        }

        // flipping the partner ruling composes with the tangent-plane reflection
        const PointPair pair = PointPair::make(f, z, p0, c.p1);
        for (Ruling f0 : kFams) {
            if (frame_condition(pair, f0, Ruling::U) > kSweepFrameCondition ||
                frame_condition(pair, f0, Ruling::V) > kSweepFrameCondition) {
                ++s.flips_skipped;
                continue;
            }
            const RigidMotion a = build_ivory_motion(pair, f0, Ruling::U);
            const RigidMotion b = build_ivory_motion(pair, f0, Ruling::V);
            const Mat3 flipped = a.R * reflection_matrix(n);
            raise(s.motion_flip, (b.R - flipped).cwiseAbs().maxCoeff());
            ++s.flips;
        }
    }

    auto rv = [&] { return Vec3(rng_wedge.uniform(-1, 1), rng_wedge.uniform(-1, 1), rng_wedge.uniform(-1, 1)); };
    for (int i = 0; i < samples; ++i) {
        const Vec3 a = rv(), b = rv(), P = rv(), Q = rv();
        raise(s.wedge, wedge_identity_residual(a, b, P, Q));
        ++s.wedges;
    }
    return s;
}

} // namespace bianchi
