#include "doctest.h"

#include <cmath>
#include <optional>

#include "bianchi/ivory.hpp"
#include "bianchi/sampling.hpp"
#include "bianchi/tangency.hpp"
#include "test_support.hpp"

using namespace bianchi;

namespace {

const ConfocalFamily hyp = ConfocalFamily::hyperboloid(4.0, -1.0, 1.0);
const ConfocalFamily par = ConfocalFamily::paraboloid(1.0, -1.0);
constexpr Ruling kFams[] = {Ruling::U, Ruling::V};

} // namespace

TEST_CASE("ivory lengths: examples")
{
    const ParamPoint p0 = ParamPoint::finite(1.0, 0.0), p1 = ParamPoint::finite(2.0, -1.0);
    CHECK(ivory_length_residual(PointPair::make(hyp, 0.0, p0, p1)) <= 1e-15);
    CHECK(ivory_length_residual(PointPair::make(hyp, 0.7, p0, p0)) <= 1e-15);
    const PointPair pair = PointPair::make(hyp, 0.5, p0, p1);
    CHECK(ivory_length_residual(pair) <= 1e-12);
    CHECK(pair.V01.squaredNorm() == doctest::Approx(pair.V10.squaredNorm()).epsilon(1e-13));
    CHECK(pair.V01.norm() > 0.1);
    // caches agree with fresh evaluation
    CHECK(bianchi::testing::near(pair.xz1, eval(hyp, 0.5, p1).x, 1e-14));
    CHECK(bianchi::testing::near(pair.V01, eval(hyp, 0.5, p1).x - eval(hyp, 0.0, p0).x, 1e-14));
}

TEST_CASE("angle identities: trivial cases")
{
    const ParamPoint p0 = ParamPoint::finite(0.4, 1.5), p1 = ParamPoint::finite(-1.0, 2.0);
    for (Ruling f0 : kFams) {
        CHECK(segment_ruling_angle_residual(PointPair::make(hyp, 0.0, p0, p1), f0) <= 1e-15);
        CHECK(segment_ruling_angle_residual(PointPair::make(hyp, 0.6, p0, p0), f0) <= 1e-12);
        CHECK(segment_ruling_angle_residual(PointPair::make(par, 0.6, p0, p0), f0) <= 1e-12);
        CHECK(ruling_angle_residual(PointPair::make(hyp, 0.6, p0, p0), f0, f0) <= 1e-15);
        for (Ruling f1 : kFams) {
            CHECK(ruling_angle_residual(PointPair::make(hyp, 0.0, p0, p1), f0, f1) <= 1e-15);
            CHECK(gram_residual(PointPair::make(par, 0.0, p0, p1), f0, f1) <= 1e-15);
        }
    }
    CHECK(tangency_symmetry_residual(PointPair::make(par, 0.3, p0, p0)) <= 1e-15);
}

TEST_CASE("gram equality holds on a collinear triple")
{
    // p1 on the u-ruling through p0: V01 and the rulings become nearly dependent.
    const ParamPoint p0 = ParamPoint::finite(1.0, 0.0), p1 = ParamPoint::finite(3.0, 0.0);
    const PointPair pair = PointPair::make(hyp, 0.0, p0, p1);
    CHECK(frame_condition(pair, Ruling::U, Ruling::U) > 1e8);
    CHECK(gram_residual(pair, Ruling::U, Ruling::U) <= 1e-10);
    // Just off z = 0 the frames differ but stay collinear.
    CHECK_THROWS_AS(build_ivory_motion(PointPair::make(hyp, 1e-12, p0, p1), Ruling::U, Ruling::U),
                    DegenerateFrameError);
}

TEST_CASE("static identity sweep")
{
    Rng rng(7);
    for (auto kind : {QuadricKind::HyperboloidOneSheet, QuadricKind::HyperbolicParaboloid}) {
        double worst = 0.0;
        for (int i = 0; i < 2500; ++i) {
            const ConfocalFamily f = random_family(rng, kind);
            const double z = random_z(rng, f);
            const PointPair pair = PointPair::make(f, z, random_point(rng, f), random_point(rng, f));
            worst = std::max(worst, ivory_length_residual(pair));
            worst = std::max(worst, tangency_symmetry_residual(pair));
            for (Ruling f0 : kFams) {
                worst = std::max(worst, ruling_length_residual(pair, f0));
                worst = std::max(worst, segment_ruling_angle_residual(pair, f0));
                for (Ruling f1 : kFams) {
                    worst = std::max(worst, ruling_angle_residual(pair, f0, f1));
                    worst = std::max(worst, gram_residual(pair, f0, f1));
                }
            }
        }
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("tangency on one side implies it on the other")
{
    const TangencyConfig c = solve_tangency(hyp, 0.5, 1.0, 0.0, 2.0);
    const PointPair pair = PointPair::make(hyp, 0.5, ParamPoint::finite(1.0, 0.0), c.p1);
    const Vec3 n01 = eval(hyp, 0.0, c.p1).scaled_normal;
    CHECK(std::abs(pair.V10.dot(n01)) <= 1e-10 * pair.V10.norm() * n01.norm());
}

TEST_CASE("ivory motion: identity at z = 0 and random configurations")
{
    const ParamPoint p = ParamPoint::finite(0.5, -1.0);
    const RigidMotion id = build_ivory_motion(PointPair::make(hyp, 0.0, p, p), Ruling::U, Ruling::V);
    CHECK((id.R - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(id.t.norm() <= 1e-15);

    Rng rng(11);
    for (auto kind : {QuadricKind::HyperboloidOneSheet, QuadricKind::HyperbolicParaboloid}) {
        double worst_map = 0, worst_orth = 0;
        int built = 0;
        for (int i = 0; i < 1000; ++i) {
            const ConfocalFamily f = random_family(rng, kind);
            const double z = random_z(rng, f);
            const PointPair pair = PointPair::make(f, z, random_point(rng, f), random_point(rng, f));
            for (Ruling f0 : kFams)
                for (Ruling f1 : kFams) {
                    if (frame_condition(pair, f0, f1) > 1e6)
                        continue;
                    const RigidMotion m = build_ivory_motion(pair, f0, f1);
                    worst_map = std::max(worst_map, ivory_motion_residual(m, pair, f0, f1));
                    worst_orth = std::max(worst_orth, orthogonality_defect(m.R));
                    CHECK(m.R.determinant() == doctest::Approx(m.det_sign).epsilon(1e-9));
                    ++built;
                }
        }
        CHECK(built > 3500);
        CHECK(worst_map <= 1e-9);
        CHECK(worst_orth <= 1e-9);
    }
}

TEST_CASE("flipping the partner ruling composes with the tangent-plane reflection")
{
    Rng rng(99);
    for (auto kind : {QuadricKind::HyperboloidOneSheet, QuadricKind::HyperbolicParaboloid}) {
        double worst = 0;
        int n = 0;
        for (int i = 0; i < 500; ++i) {
            const ConfocalFamily f = random_family(rng, kind);
            const double z = random_z(rng, f);
            const ParamPoint p0 = random_point(rng, f);
            std::optional<TangencyConfig> solved;
            try {
                solved = solve_tangency(f, z, p0.u, p0.v, rng.uniform(-3.0, 3.0));
            } catch (const Error&) {
                continue;
            }
            const TangencyConfig& c = *solved;
            if (c.p1.chart != Chart::Finite || std::abs(c.p1.u) > 50.0)
                continue;
            const PointPair pair = PointPair::make(f, z, p0, c.p1);
            for (Ruling f0 : kFams) {
                if (frame_condition(pair, f0, Ruling::U) > 1e5 || frame_condition(pair, f0, Ruling::V) > 1e5)
                    continue;
                const RigidMotion a = build_ivory_motion(pair, f0, Ruling::U);
                const RigidMotion b = build_ivory_motion(pair, f0, Ruling::V);
                CHECK(a.det_sign == -b.det_sign);
                const Mat3 flipped = a.R * reflection_matrix(c.normal00);
                worst = std::max(worst, (b.R - flipped).cwiseAbs().maxCoeff());
                ++n;
            }
        }
        CHECK(n > 300);
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("polar projection")
{
    Mat3 m;
    m << 2, 0, 0, 0, 1, 0, 0, 0, 3;
    CHECK((polar_orthogonal(m) - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
    const RigidMotion r{Eigen::AngleAxisd(0.3, Vec3(1, 2, 3).normalized()).toRotationMatrix(), Vec3(1, -1, 2), 1};
    const Vec3 x(0.2, 5.0, -1.0);
    CHECK(bianchi::testing::near(r.inverse().apply(r.apply(x)), x, 1e-15));
    CHECK(bianchi::testing::near(r.compose(r.inverse()).apply(x), x, 1e-15));
}
