#include "bianchi/sampling.hpp"

#include <cmath>

namespace bianchi {

ConfocalFamily random_family(Rng& rng, QuadricKind kind)
{
    const double a1 = rng.uniform(0.5, 5.0);
    const double a2 = -rng.uniform(0.5, 5.0);
    if (kind == QuadricKind::HyperbolicParaboloid)
        return ConfocalFamily::paraboloid(a1, a2);
    const double a3 = rng.uniform(0.5, 5.0);
    return ConfocalFamily::hyperboloid(a1, a2, a3);
}

double random_z(Rng& rng, const ConfocalFamily& family, double fraction)
{
    const auto [lo, hi] = family.z_range();
    const double margin = 0.5 * (1.0 - fraction) * (hi - lo);
    return rng.uniform(lo + margin, hi - margin);
}

ParamPoint random_point(Rng& rng, const ConfocalFamily& family, const SampleDomain& domain)
{
    for (;;) {
        const double u = rng.uniform(domain.param_min, domain.param_max);
        const double v = rng.uniform(domain.param_min, domain.param_max);
        if (!family.is_hyperboloid() || std::abs(u - v) >= domain.min_gap)
            return ParamPoint::finite(u, v);
    }
}

} // namespace bianchi
