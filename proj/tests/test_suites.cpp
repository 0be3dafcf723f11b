#include "doctest.h"

#include "bianchi/suites.hpp"

using namespace bianchi;

TEST_CASE("identity suite on a small sweep")
{
    for (auto kind : {QuadricKind::HyperboloidOneSheet, QuadricKind::HyperbolicParaboloid}) {
        const IdentitySuite s = run_identity_suite(kind, 1500, 3);
        CHECK(s.samples == 1500);
        CHECK(s.ivory_length <= 1e-10);
        CHECK(s.ruling_length <= 1e-10);
        CHECK(s.segment_ruling_angle <= 1e-10);
        CHECK(s.ruling_angle <= 1e-10);
        CHECK(s.tangency_symmetry <= 1e-10);
        CHECK(s.gram <= 1e-10);
        CHECK(s.motions + s.motions_skipped == 4 * 1500);
        CHECK(s.motions_skipped < 60);
        CHECK(s.motion_map <= 1e-9);
        CHECK(s.motion_orthogonality <= 1e-9);
        CHECK(s.flips > 2500);
        CHECK(s.motion_flip <= 1e-9);
        CHECK(s.solved > 1400);
        CHECK(s.reflection <= 1e-9);
        CHECK(s.factorization <= 1e-9);
        CHECK(s.integrability <= 1e-9);
        CHECK(s.controls > 1300);
        CHECK(s.control_reflection >= 1e-3);
        CHECK(s.control_factorization >= 1e-3);
        CHECK(s.control_integrability >= 1e-3);
        CHECK(s.wedges == 1500);
        CHECK(s.wedge <= 1e-13);
    }
}

TEST_CASE("identity suite is reproducible and seed-dependent")
{
    const IdentitySuite a = run_identity_suite(QuadricKind::HyperbolicParaboloid, 300, 11);
    const IdentitySuite b = run_identity_suite(QuadricKind::HyperbolicParaboloid, 300, 11);
    const IdentitySuite c = run_identity_suite(QuadricKind::HyperbolicParaboloid, 300, 12);
    CHECK(a.gram == b.gram);
    CHECK(a.control_reflection == b.control_reflection);
    CHECK(a.motion_map == b.motion_map);
    CHECK(a.control_reflection != c.control_reflection);
    CHECK_THROWS_AS(run_identity_suite(QuadricKind::HyperbolicParaboloid, 0, 1), DomainError);
}
