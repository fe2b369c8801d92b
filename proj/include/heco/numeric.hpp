#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace heco::numeric {

// Bisection to a relative/absolute x-tolerance. f(lo) and f(hi) must bracket a root.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-12, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw std::runtime_error("bisect: endpoints do not bracket a root");
    for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) { lo = mid; flo = fm; }
        else { hi = mid; }
    }
    return 0.5 * (lo + hi);
}

// Golden-section minimization on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double xtol = 1e-10) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) { b = d; d = c; fd = fc; c = b - inv_phi * (b - a); fc = f(c); }
        else { a = c; c = d; fc = fd; d = a + inv_phi * (b - a); fd = f(d); }
    }
    return 0.5 * (a + b);
}

// Vertex of the parabola through (x0,y0),(x1,y1),(x2,y2); falls back to x1.
inline double parabolic_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    double d1 = (x1 - x0) * (y1 - y2);
    double d2 = (x1 - x2) * (y1 - y0);
    double denom = 2.0 * (d1 - d2);
    if (denom == 0.0) return x1;
    double num = (x1 - x0) * d1 - (x1 - x2) * d2;
    return x1 - num / denom;
}

}  // namespace heco::numeric
