#include "pumbem/polybasis.hpp"

#include <cmath>

namespace pumbem::poly {

double erf(double x) noexcept {
    if (x > 6.0) return 1.0;
    if (x < -6.0) return -1.0;
    return std::erf(x);
}

double artanh(double x) {
    if (!(std::abs(x) < 1.0)) throw std::domain_error("artanh: argument outside (-1, 1)");
    return std::atanh(x);
}

double legendre(int m, double x) noexcept {
    if (m == 0) return 1.0;
    double p_prev = 1.0;
    double p = x;
    for (int k = 1; k < m; ++k) {
        const double p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
        p_prev = p;
        p = p_next;
    }
    return p;
}

LegendreValue legendre_with_derivative(int m, double x) noexcept {
    if (m == 0) return {1.0, 0.0};
    // P'_{k+1} = P'_{k-1} + (2k+1) P_k, valid at x = +-1 as well
    double p_prev = 1.0, p = x;
    double d_prev = 0.0, d = 1.0;
    for (int k = 1; k < m; ++k) {
        const double p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
        const double d_next = d_prev + (2 * k + 1) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    return {p, d};
}

double clenshaw(std::span<const double> coeffs, double x) {
    if (coeffs.empty()) throw std::invalid_argument("clenshaw: empty coefficient list");
    double b1 = 0.0, b2 = 0.0;
    const double two_x = 2.0 * x;
    for (std::size_t v = coeffs.size() - 1; v >= 1; --v) {
        const double b0 = two_x * b1 - b2 + coeffs[v];
        b2 = b1;
        b1 = b0;
    }
    // sum c_v T_v - c_0/2 = x*b1 - b2 + c_0/2
    return x * b1 - b2 + 0.5 * coeffs[0];
}

}  // namespace pumbem::poly
