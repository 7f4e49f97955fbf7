#ifndef BSD_NORMAL_HPP
#define BSD_NORMAL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bsd::normal {

inline constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
inline constexpr double inv_sqrt_2 = 0.7071067811865475244008444;

/// Standard normal density.
inline double pdf(double x) {
    if (std::isnan(x) || std::isinf(x))
        throw std::domain_error("normal::pdf: non-finite argument");
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

/// Standard normal CDF, Phi(x) = erfc(-x/sqrt(2))/2. Accepts +-inf.
/// Evaluated in extended precision; double erfc loses ~1e-13 relative
/// accuracy past x ~ 27, which the deep-tail callers cannot afford.
inline double cdf(double x) {
    if (std::isnan(x))
        throw std::domain_error("normal::cdf: NaN argument");
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    return static_cast<double>(0.5L * erfcl(-static_cast<long double>(x) * 0.70710678118654752440L));
}

/// Complementary CDF, 1 - Phi(x), without cancellation in the right tail.
inline double ccdf(double x) {
    if (std::isnan(x))
        throw std::domain_error("normal::ccdf: NaN argument");
    if (x == -std::numeric_limits<double>::infinity()) return 1.0;
    if (x == std::numeric_limits<double>::infinity()) return 0.0;
    return static_cast<double>(0.5L * erfcl(static_cast<long double>(x) * 0.70710678118654752440L));
}

/// Inverse of the standard normal CDF on (0,1).
double quantile(double p);

}  // namespace bsd::normal

#endif
