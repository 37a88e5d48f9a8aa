#pragma once

#include <cmath>

#include "lossq/error.hpp"

namespace lossq::detail {

// Least root in (0,1) of z = g(z) for a convex generating-function-like g with
// g(0) > 0 and g'(1-) > 1. The gap g(z) - z is convex, so its minimum on (0,1)
// (where g' = 1) is negative and brackets the root from the right.
template <class G, class DG>
double least_fixed_point(G g, DG dg, double tol = 1e-13) {
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        (dg(mid) < 1.0 ? lo : hi) = mid;
    }
    double right = lo;
    if (!(g(right) - right < 0.0)) {
        // The minimum sits numerically at 1; step back until the gap turns negative.
        for (double h = 1e-3; h > 1e-14; h *= 0.5) {
            if (g(1.0 - h) - (1.0 - h) < 0.0) {
                right = 1.0 - h;
                break;
            }
        }
        if (!(g(right) - right < 0.0)) throw BracketError("no sign change of z - g(z) found in (0,1)");
    }
    double left = 0.0;
    while (right - left > tol) {
        const double mid = 0.5 * (left + right);
        (g(mid) - mid > 0.0 ? left : right) = mid;
    }
    double z = 0.5 * (left + right);
    const double slope = dg(z) - 1.0;
    if (slope != 0.0) {
        const double polished = z - (g(z) - z) / slope;
        if (polished > 0.0 && polished < 1.0 && std::abs(polished - z) < 10 * tol) z = polished;
    }
    return z;
}

}  // namespace lossq::detail
