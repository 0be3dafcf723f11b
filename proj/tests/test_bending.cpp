#include "doctest.h"

#include <cmath>

#include "bianchi/bending.hpp"
#include "bianchi/expression.hpp"
#include "test_support.hpp"

using namespace bianchi;

namespace {

const ConfocalFamily hyp = ConfocalFamily::hyperboloid(4.0, -1.0, 1.0);
const ConfocalFamily par = ConfocalFamily::paraboloid(1.0, -1.0);

RuledBendingSpec spec_for(const ConfocalFamily& f, double u_ref, const std::string& kappa, int sigma)
{
    RuledBendingSpec s{f};
    s.u_ref = u_ref;
    s.kappa = Expression::parse(kappa);
    s.sigma = sigma;
    return s;
}

double second_form_gap(const SurfacePatch& a, const SurfacePatch& b)
{
    double worst = 0;
    for (std::size_t k = 0; k < a.jets.size(); ++k)
        worst = std::max(worst, (a.jets[k].second_form() - b.jets[k].second_form()).cwiseAbs().maxCoeff());
    return worst;
}

} // namespace

TEST_CASE("expression parser")
{
    CHECK(Expression::parse("kappa + 0.1")(2.0, 1.5) == doctest::Approx(1.6));
    CHECK(Expression::parse("-v^2 + 2*v")(3.0, 0.0) == doctest::Approx(-3.0));
    CHECK(Expression::parse("2^3^2")(0.0, 0.0) == doctest::Approx(512.0));
    CHECK(Expression::parse("sin(pi/2) * exp(0) - cos(0)")(0.0, 0.0) == doctest::Approx(0.0));
    CHECK(Expression::parse(" (1 + v) / 4 ")(3.0, 0.0) == doctest::Approx(1.0));
    CHECK(Expression::parse("sqrt(4) + log(1) + tan(0)")(0.0, 0.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(Expression::parse("kappa +"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("foo(v)"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("(v"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("v v"), ConfigError);
}

TEST_CASE("base spherical frame")
{
    for (const auto& f : {hyp, par})
        for (double v : {-0.7, 0.0, 0.4}) {
            const RulingFrame fr = base_frame(f, v);
            Mat3 F;
            F << fr.e[0], fr.e[1], fr.e[2];
            CHECK(orthogonality_defect(F) <= 1e-14);
            CHECK(F.determinant() == doctest::Approx(1.0));
            // derivative check against central differences
            const double h = 1e-5;
            const RulingFrame p = base_frame(f, v + h), m = base_frame(f, v - h);
            for (int i = 0; i < 3; ++i)
                CHECK(bianchi::testing::near(fr.de[i], (p.e[i] - m.e[i]) / (2 * h), 1e-8));
        }
}

TEST_CASE("identity bending recovers the base patch")
{
    const Grid2D g = Grid2D::make(1.5, 2.5, -0.5, 0.5, 9, 9);
    const SurfacePatch base = sample(QuadricSurface(hyp), g);
    const SurfacePatch same = bend(spec_for(hyp, 2.8, "kappa", 1), g);
    CHECK(isometry_residual(base, base) == 0.0);
    CHECK(isometry_residual(base, same) <= 1e-10);
    double gap = 0;
    for (std::size_t k = 0; k < base.jets.size(); ++k)
        gap = std::max(gap, (base.jets[k].x - same.jets[k].x).norm());
    CHECK(gap <= 1e-10);
    CHECK(second_form_gap(base, same) <= 1e-10);
}

TEST_CASE("perturbed bendings are isometric but not congruent")
{
    struct Case {
        ConfocalFamily f;
        Grid2D g;
        double u_ref;
    };
    const Case cases[] = {{hyp, Grid2D::make(1.5, 2.5, -0.5, 0.5, 9, 9), 2.8},
                          {par, Grid2D::make(-0.5, 0.5, -0.5, 0.5, 9, 9), 0.0}};
    for (const auto& c : cases) {
        const SurfacePatch base = sample(QuadricSurface(c.f), c.g);
        for (const char* kappa : {"kappa + 0.1", "kappa + 0.3*sin(2*v)"})
            for (int sigma : {1, -1}) {
                const SurfacePatch bent = bend(spec_for(c.f, c.u_ref, kappa, sigma), c.g);
                CHECK(isometry_residual(base, bent) <= 1e-8);
                CHECK(second_form_gap(base, bent) >= 1e-2);
            }
        // mirror branch alone
        const SurfacePatch mirror = bend(spec_for(c.f, c.u_ref, "kappa", -1), c.g);
        CHECK(isometry_residual(base, mirror) <= 1e-8);
    }
}

TEST_CASE("bent jets agree with central differences")
{
    const BentSurface s(
        [] {
            RuledBendingSpec sp{hyp};
            sp.u_ref = 2.8;
            sp.kappa = Expression::parse("kappa + 0.2*cos(v)");
            sp.v_min = -0.5;
            sp.v_max = 0.5;
            return sp;
        }());
    const double u = 1.8, v = 0.13, h = 1e-4;
    const SurfaceJet j = s.jet(u, v);
    const SurfaceJet up = s.jet(u + h, v), um = s.jet(u - h, v), vp = s.jet(u, v + h), vm = s.jet(u, v - h);
    using bianchi::testing::near;
    CHECK(near(j.x_u, (up.x - um.x) / (2 * h), 1e-7));
    CHECK(near(j.x_v, (vp.x - vm.x) / (2 * h), 1e-7));
    CHECK(near(j.x_uu, (up.x_u - um.x_u) / (2 * h), 1e-7));
    CHECK(near(j.x_uv, (vp.x_u - vm.x_u) / (2 * h), 1e-7));
    CHECK(near(j.x_vv, (vp.x_v - vm.x_v) / (2 * h), 1e-7));
    CHECK(s.frame_drift() <= 1e-10);
}

TEST_CASE("first form is exact along the rulings")
{
    const Grid2D g = Grid2D::make(1.0, 3.0, -0.4, 0.4, 21, 5);
    const SurfacePatch base = sample(QuadricSurface(hyp), g);
    const SurfacePatch bent = bend(spec_for(hyp, 3.5, "kappa - 0.2", 1), g);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i)
            CHECK((base.at(i, j).first_form() - bent.at(i, j).first_form()).cwiseAbs().maxCoeff() <=
                  1e-12 * std::max(1.0, base.at(i, j).first_form().cwiseAbs().maxCoeff()));
}

TEST_CASE("invalid bending specs")
{
    RuledBendingSpec s = spec_for(hyp, 0.0, "kappa", 1);
    s.v_min = -0.5;
    s.v_max = 0.5;
    CHECK_THROWS_AS(BentSurface{s}, ValidityError);
    s.u_ref = 2.0;
    s.sigma = 0;
    CHECK_THROWS_AS(BentSurface{s}, ValidityError);
}
