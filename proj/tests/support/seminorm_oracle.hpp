#pragma once

#include <functional>

#include "pumbem/quadrature.hpp"

namespace pumbem::oracle {

// int_c^d int_c^d |r(t) - r(tau)|^2 / |t - tau|^2 as twice the integral over
// tau < t, Duffy-collapsed at the diagonal, with plain n x n Gauss
inline double seminorm(const std::function<double(double)>& r, double c, double d, int n) {
    const auto& g = cached_unit_rule(n);
    const double h = d - c;
    double s = 0.0;
    for (std::size_t a = 0; a < g.order(); ++a)
        for (std::size_t b = 0; b < g.order(); ++b) {
            const double u = g.nodes[a], v = g.nodes[b];
            const double t = c + h * u, tau = c + h * u * v;
            const double q = (r(t) - r(tau)) / (t - tau);
            s += 2.0 * g.weights[a] * g.weights[b] * h * h * u * q * q;
        }
    return s;
}

}  // namespace pumbem::oracle
