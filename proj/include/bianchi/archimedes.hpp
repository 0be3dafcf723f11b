#pragma once

#include <vector>

#include "bianchi/types.hpp"

namespace bianchi {

// Balance of the region under y = x^2 on [0,1] against the region under y = x,
// fulcrum at the origin. Parabola slices hang at arm 1, triangle slices stay at x.

struct SliceMoments {
    double left = 0.0;   // parabola slice length x^2 times the arm 1
    double right = 0.0;  // triangle slice length x times its own arm x
};

SliceMoments slice_factorization(double x);

struct BalanceSlice {
    double x;
    double parabola;     // x^2
    double triangle;     // x
    double lever_arm;    // 1 for the parabola slice
    double moment_left;
    double moment_right;
};

struct BalanceLedger {
    int n = 0;
    std::vector<BalanceSlice> slices;
    double moment_left = 0.0;
    double moment_right = 0.0;
    double area_estimate = 0.0;           // parabola area, equal to the triangle's moment
    double max_slice_residual = 0.0;
};

/// Midpoint sums over n slices.
BalanceLedger balance_moments(int n);

/// Segment of y = x^2 below the chord y = height, over its inscribed triangle.
double segment_triangle_ratio(int n, double height = 1.0);

struct Centroid {
    double abscissa = 0.0;
    double height_fraction = 0.0;  // centroid height over the vertex-to-chord distance
};

Centroid segment_centroid(int n, double height = 1.0);

} // namespace bianchi
