#include "bsd/likelihood.hpp"

#include <cmath>
#include <limits>

#include "bsd/normal.hpp"

namespace bsd {

namespace {

struct TermDerivs {
    double a;        // a(s+j)
    double phi;      // standard normal pdf at a(s+j)
    double da, db;   // partials of a in alpha, beta
    double d2aa, d2ab, d2bb;
};

TermDerivs term_derivs(double t, const Params& p) {
    TermDerivs d{};
    d.a = a_eval(t, p);
    d.phi = normal::inv_sqrt_2pi * std::exp(-0.5 * d.a * d.a);
    d.da = -d.a / p.alpha;
    double sb = std::sqrt(t) * p.beta * std::sqrt(p.beta);
    d.db = -(t + p.beta) / (2.0 * p.alpha * sb);
    d.d2aa = 2.0 * d.a / (p.alpha * p.alpha);
    d.d2ab = -d.db / p.alpha;
    d.d2bb = (3.0 * t + p.beta) / (4.0 * p.alpha * std::sqrt(t) * p.beta * p.beta * std::sqrt(p.beta));
    return d;
}

}  // namespace

ObsDerivatives obs_derivatives(std::int64_t s, const Params& p) {
    ObsDerivatives out{};
    double prob = pmf(s, p);
    if (!(prob > 0.0)) {
        out.logp = -std::numeric_limits<double>::infinity();
        out.valid = false;
        return out;
    }
    out.logp = std::log(prob);
    out.valid = true;

    // j = 0 contributes nothing at s = 0: a(0) = -inf so phi vanishes
    // faster than any derivative of a blows up.
    double ga = 0.0, gb = 0.0;       // per-observation score
    double haa = 0.0, hab = 0.0, hbb = 0.0;
    for (int j = 0; j <= 1; ++j) {
        if (s + j == 0) continue;
        TermDerivs d = term_derivs(static_cast<double>(s + j), p);
        double sign = (j == 1) ? 1.0 : -1.0;
        double w = sign * d.phi / prob;
        ga += w * d.da;
        gb += w * d.db;
        haa += w * (d.d2aa - d.a * d.da * d.da);
        hab += w * (d.d2ab - d.a * d.da * d.db);
        hbb += w * (d.d2bb - d.a * d.db * d.db);
    }
    out.d_alpha = ga;
    out.d_beta = gb;
    out.d2_aa = haa - ga * ga;
    out.d2_ab = hab - ga * gb;
    out.d2_bb = hbb - gb * gb;
    return out;
}

}  // namespace bsd
