#include "bianchi/archimedes.hpp"

#include <cmath>
#include <string>

namespace bianchi {

namespace {

void require_slices(int n)
{
    if (n < 2)
        throw DomainError("need at least 2 slices, got " + std::to_string(n));
}

void require_height(double h)
{
    if (!(h > 0.0) || !std::isfinite(h))
        throw DomainError("chord height must be positive and finite");
}

} // namespace

SliceMoments slice_factorization(double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("slice abscissa must lie in [0, 1]");
    const double parabola = x * x, triangle = x;
    return {parabola * 1.0, triangle * x};
}

BalanceLedger balance_moments(int n)
{
    require_slices(n);
    BalanceLedger ledger;
    ledger.n = n;
    ledger.slices.reserve(n);
    const double dx = 1.0 / n;
    for (int k = 0; k < n; ++k) {
        const double x = (k + 0.5) * dx;
        const SliceMoments m = slice_factorization(x);
        ledger.slices.push_back({x, x * x, x, 1.0, m.left, m.right});
        ledger.moment_left += m.left * dx;
        ledger.moment_right += m.right * dx;
        ledger.max_slice_residual = std::max(ledger.max_slice_residual, std::abs(m.left - m.right));
    }
    ledger.area_estimate = ledger.moment_right;
    return ledger;
}

double segment_triangle_ratio(int n, double height)
{
    require_slices(n);
    require_height(height);
    const double a = std::sqrt(height);
    const double dx = 2.0 * a / n;
    double area = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = (k + 0.5 - 0.5 * n) * dx;
        area += (height - x * x) * dx;
    }
    return area / (a * height);
}

Centroid segment_centroid(int n, double height)
{
    require_slices(n);
    require_height(height);
    const double a = std::sqrt(height);
    const double dx = 2.0 * a / n;
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (int k = 0; k < n; ++k) {
        // offsets from the axis are exact negatives of each other
        const double x = (k + 0.5 - 0.5 * n) * dx;
        const double len = height - x * x;
        mass += len * dx;
        mx += x * len * dx;
        my += 0.5 * (height + x * x) * len * dx;
    }
    return {mx / (mass * a), my / mass / height};
}

} // namespace bianchi
