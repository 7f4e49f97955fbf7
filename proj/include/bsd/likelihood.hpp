#ifndef BSD_LIKELIHOOD_HPP
#define BSD_LIKELIHOOD_HPP

#include <cstdint>

#include "bsd/distribution.hpp"

namespace bsd {

/// Log-pmf of one observation together with its first and second partial
/// derivatives in (alpha, beta). Shared by the plain fit and, through the
/// chain rule over beta_i = exp(x_i' eta), by the regression fit.
struct ObsDerivatives {
    double logp;
    double d_alpha, d_beta;
    double d2_aa, d2_ab, d2_bb;
    bool valid;  // false when the pmf underflowed to zero
};

ObsDerivatives obs_derivatives(std::int64_t s, const Params& p);

}  // namespace bsd

#endif
