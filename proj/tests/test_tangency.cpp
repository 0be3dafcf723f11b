#include "doctest.h"

#include <cmath>
#include <vector>

#include "bianchi/sampling.hpp"
#include "bianchi/tangency.hpp"
#include "test_support.hpp"

using namespace bianchi;
using bianchi::testing::near;

namespace {

const ConfocalFamily hyp = ConfocalFamily::hyperboloid(4.0, -1.0, 1.0);
const ConfocalFamily par = ConfocalFamily::paraboloid(1.0, -1.0);

// Tangency-solved configurations with a finite, moderate partner.
std::vector<TangencyConfig> solved_samples(QuadricKind kind, int count, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<TangencyConfig> out;
    while (static_cast<int>(out.size()) < count) {
        const ConfocalFamily f = random_family(rng, kind);
        const double z = random_z(rng, f);
        const ParamPoint p0 = random_point(rng, f);
        const double v1 = rng.uniform(-3.0, 3.0);
        try {
            TangencyConfig c = solve_tangency(f, z, p0.u, p0.v, v1);
            if (c.p1.chart == Chart::Finite && std::abs(c.u1()) < 1e3 && !c.free_ruling &&
                (!f.is_hyperboloid() || std::abs(c.u1() - c.v1()) > 1e-3))
                out.push_back(c);
        } catch (const NoSolutionError&) {
        }
    }
    return out;
}

} // namespace

TEST_CASE("solve_tangency examples")
{
    const TangencyConfig trivial = solve_tangency(hyp, 0.0, 1.0, 0.0, 0.0);
    CHECK(trivial.free_ruling);
    CHECK(tangency_residual(solve_tangency(hyp, 0.0, 1.0, 0.0, 0.0)) <= 1e-15);

    const TangencyConfig h = solve_tangency(hyp, 0.5, 1.0, 0.0, 2.0);
    CHECK_FALSE(h.free_ruling);
    CHECK(h.p1.chart == Chart::Finite);
    CHECK(tangency_residual(h) <= 1e-12);
    // back-substitution into the cleared relation
    CHECK(std::abs(tangency_polynomial(hyp, 0.5, 1.0, 0.0, h.u1(), 2.0)) <= 1e-12);

    const TangencyConfig p = solve_tangency(par, 0.25, 0.0, 0.0, 1.0);
    CHECK(tangency_residual(p) <= 1e-12);
    // at the vertex the tangent plane is z = 0: 2 u1 v1 + z/2 = 0
    CHECK(p.u1() == doctest::Approx(-0.0625).epsilon(1e-14));
}

TEST_CASE("mirrored solve for v1 agrees with the u1 solve")
{
    const TangencyConfig a = solve_tangency(hyp, 0.3, 1.2, -0.4, 0.8);
    const TangencyConfig b = solve_tangency_for_v1(hyp, 0.3, 1.2, -0.4, a.u1());
    CHECK(b.v1() == doctest::Approx(0.8).epsilon(1e-12));
    const TangencyConfig c = solve_tangency(par, 0.3, 0.4, -0.7, -1.1);
    CHECK(solve_tangency_for_v1(par, 0.3, 0.4, -0.7, c.u1()).v1() == doctest::Approx(-1.1).epsilon(1e-12));
}

TEST_CASE("paraboloid degenerate relation reports no solution")
{
    // Vertex of x_0 with v1 = 0: the partner ruling u -> x_z(u,0) is parallel to the tangent
    // plane z = 0 but lifted by z/2.
    CHECK_THROWS_AS(solve_tangency(par, 0.25, 0.0, 0.0, 0.0), NoSolutionError);
}

TEST_CASE("tangency residual sweep and multi-affine structure")
{
    for (auto kind : {QuadricKind::HyperboloidOneSheet, QuadricKind::HyperbolicParaboloid}) {
        double worst = 0;
        for (const auto& c : solved_samples(kind, 10000, 3))
            worst = std::max(worst, tangency_residual(c));
        CHECK(worst <= 1e-10);

        Rng rng(5);
        double worst_affine = 0;
        for (int i = 0; i < 500; ++i) {
            const ConfocalFamily f = random_family(rng, kind);
            const double z = random_z(rng, f);
            double args[4] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
            for (int k = 0; k < 4; ++k) {
                auto at = [&](double t) {
                    double a[4] = {args[0], args[1], args[2], args[3]};
                    a[k] = t;
                    return tangency_polynomial(f, z, a[0], a[1], a[2], a[3]);
                };
                const double t = args[k], h = 0.7;
                const double second = at(t + h) - 2.0 * at(t) + at(t - h);
                const double scale = std::abs(at(t + h)) + 2.0 * std::abs(at(t)) + std::abs(at(t - h)) + 1.0;
                worst_affine = std::max(worst_affine, std::abs(second) / scale);
            }
        }
        CHECK(worst_affine <= 1e-9);
    }
}

TEST_CASE("m-field: vanishing, u1-independence, quadratic dependence")
{
    const TangencyConfig zero = make_config(hyp, 0.0, 1.0, 0.0, ParamPoint::finite(1.0, 0.0));
    CHECK(m_field(zero, MFamily::M).m.norm() == 0.0);

    for (const auto& f : {hyp, par}) {
        const double z = 0.35, u0 = 0.6, v0 = -1.3, v1 = 0.9;
        const TangencyConfig c = solve_tangency(f, z, u0, v0, v1);
        const TangencyConfig shifted = make_config(f, z, u0, v0, ParamPoint::finite(c.u1() + 1.0, v1));
        const Vec3 m1 = m_field(c, MFamily::M).m, m2 = m_field(shifted, MFamily::M).m;
        CHECK(near(m1, m2, 1e-12));
        CHECK(near(m_field_at_state(f, z, u0, v0, v1, MFamily::M).m, m1, 1e-12));
        const Vec3 dm = m_field(shifted, MFamily::M).m_var;
        CHECK(near(m_field_at_state(f, z, u0, v0, v1, MFamily::M).m_var, dm, 1e-12));

        // orthogonality to the ruling and to V
        const Vec3 xu = eval(f, z, c.p1).x_u;
        CHECK(std::abs(m1.dot(xu)) <= 1e-12 * m1.norm() * xu.norm());
        CHECK(std::abs(m1.dot(c.V01)) <= 1e-12 * m1.norm() * c.V01.norm());

        // quadratic in the state: four-point interpolation predicts a fifth sample
        for (MFamily fl : {MFamily::M, MFamily::MPrime}) {
            auto m = [&](double s) { return m_field_at_state(f, z, u0, v0, s, fl).m; };
            const double s[4] = {-1.0, 0.0, 1.0, 2.0};
            const double t = 3.5;
            Vec3 pred = Vec3::Zero();
            for (int i = 0; i < 4; ++i) {
                double l = 1.0;
                for (int j = 0; j < 4; ++j)
                    if (j != i)
                        l *= (t - s[j]) / (s[i] - s[j]);
                pred += l * m(s[i]);
            }
            CHECK(near(pred, m(t), 1e-10));
            const MPolynomial poly = m_polynomial(f, z, u0, v0, fl);
            CHECK(near(poly.at(t), m(t), 1e-10));
        }
    }
}

TEST_CASE("m-prime is independent of v1")
{
    const double z = 0.35, u0 = 0.6, v0 = -1.3, u1 = 2.2;
    const TangencyConfig a = make_config(hyp, z, u0, v0, ParamPoint::finite(u1, 0.4));
    const TangencyConfig b = make_config(hyp, z, u0, v0, ParamPoint::finite(u1, -1.7));
    CHECK(near(m_field(a, MFamily::MPrime).m, m_field(b, MFamily::MPrime).m, 1e-12));
    CHECK(near(m_field_at_state(hyp, z, u0, v0, u1, MFamily::MPrime).m, m_field(a, MFamily::MPrime).m, 1e-12));
}

TEST_CASE("conditional identities on tangency-solved samples")
{
    for (auto kind : {QuadricKind::HyperboloidOneSheet, QuadricKind::HyperbolicParaboloid}) {
        double refl = 0, fact = 0, integ = 0, integ_prime = 0;
        for (const auto& c : solved_samples(kind, 3000, 17)) {
            refl = std::max(refl, reflection_residual(c));
            fact = std::max(fact, factorization_residual(c));
            integ = std::max(integ, integrability_residual(c, MFamily::M));
            // the m-prime variant at the same pair
            integ_prime = std::max(integ_prime, integrability_residual(c, MFamily::MPrime));
            if (c.z > 0)
                CHECK(factorization_lhs(c) < 0.0);
        }
        CHECK(refl <= 1e-9);
        CHECK(fact <= 1e-9);
        CHECK(integ <= 1e-9);
        CHECK(integ_prime <= 1e-9);
    }
}

TEST_CASE("conditional identities fail without tangency")
{
    const double z = 0.5, u0 = 1.0, v0 = 0.0, v1 = 2.0;
    const TangencyConfig c = solve_tangency(hyp, z, u0, v0, v1);
    const TangencyConfig off = make_config(hyp, z, u0, v0, ParamPoint::finite(c.u1() + 0.1, v1));
    CHECK(tangency_residual(off) > 1e-3);
    CHECK(reflection_residual(off) >= 1e-3);
    CHECK(factorization_residual(off) >= 1e-3);
    // The relation involves only (u0, v0, v1); break it through the normal instead.
    const Vec3 tilted = eval(hyp, 0.0, ParamPoint::finite(u0 + 0.1, v0)).normal;
    CHECK(integrability_residual(c, MFamily::M, tilted) >= 1e-3);

    const TangencyConfig pc = solve_tangency(par, z, 0.3, -0.2, 0.8);
    const TangencyConfig poff = make_config(par, z, 0.3, -0.2, ParamPoint::finite(pc.u1() + 0.1, 0.8));
    CHECK(reflection_residual(poff) >= 1e-3);
    CHECK(factorization_residual(poff) >= 1e-3);
    const Vec3 ptilted = eval(par, 0.0, ParamPoint::finite(0.4, -0.2)).normal;
    CHECK(integrability_residual(pc, MFamily::M, ptilted) >= 1e-3);
}

TEST_CASE("z = 0 limits")
{
    const TangencyConfig c = make_config(hyp, 0.0, 1.0, 0.0, ParamPoint::finite(2.0, 0.0));
    CHECK(reflection_residual(c) <= 1e-12);
    CHECK(factorization_residual(c) <= 1e-12);
    CHECK(integrability_residual(c, MFamily::M) <= 1e-12);
    // z = 0 tangency with m != 0
    const TangencyConfig d = solve_tangency(hyp, 0.0, 1.0, 0.3, 1.5);
    CHECK(m_field(d, MFamily::M).m.norm() > 1e-3);
    CHECK(integrability_residual(d, MFamily::M) <= 1e-9);
}

TEST_CASE("infinity chart")
{
    // Choose v1 making the u1 coefficient vanish: x_z(inf, v1) on the tangent plane.
    const double z = 0.5, u0 = 1.0, v0 = 0.0;
    const JetPoint j = eval(hyp, 0.0, ParamPoint::finite(u0, v0));
    // (x_z(inf, v) - x00) . N^ is affine in v; root by two samples
    auto g = [&](double v) { return (eval_at_infinity(hyp, z, v) - j.x).dot(j.scaled_normal); };
    const double v1 = -g(0.0) / (g(1.0) - g(0.0));
    const TangencyConfig c = solve_tangency(hyp, z, u0, v0, v1);
    CHECK(c.p1.chart == Chart::UAtInfinity);
    CHECK(tangency_residual(c) <= 1e-10);
    CHECK(factorization_residual(c) <= 1e-9);
}

TEST_CASE("reflection is an involution")
{
    const Vec3 n = Vec3(0.3, -1.0, 2.0).normalized();
    const Vec3 x(1.0, 2.0, 3.0);
    const Mat3 r = reflection_matrix(n);
    CHECK(near(r * (r * x), x, 1e-14));
}
