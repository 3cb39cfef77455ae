#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace pumbem {

/// Nonnegative polynomial degree (Legendre index, Chebyshev index, enrichment order).
class PolyDegree {
public:
    constexpr PolyDegree() = default;
    constexpr explicit PolyDegree(int value) : value_(value) {
        if (value < 0) throw std::invalid_argument("PolyDegree: negative degree");
    }
    constexpr int value() const noexcept { return value_; }
    constexpr operator int() const noexcept { return value_; }

private:
    int value_ = 0;
};

namespace poly {

/// Gauss error function; saturates to +-1 for |x| > 6.
double erf(double x) noexcept;

/// Inverse hyperbolic tangent. Throws std::domain_error for |x| >= 1.
double artanh(double x);

/// Legendre polynomial P_m(x) by the three-term recurrence.
double legendre(int m, double x) noexcept;

/// P_m(x) and P_m'(x) together.
struct LegendreValue {
    double value;
    double derivative;
};
LegendreValue legendre_with_derivative(int m, double x) noexcept;

/// Chebyshev sum  sum_v c_v T_v(x) - c_0/2  via Clenshaw's recurrence.
/// Throws std::invalid_argument on an empty coefficient list.
double clenshaw(std::span<const double> coeffs, double x);

}  // namespace poly
}  // namespace pumbem
