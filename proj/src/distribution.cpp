#include "bsd/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bsd/normal.hpp"
#include "bsd/rng.hpp"

namespace bsd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void Params::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::domain_error("Params: alpha must be positive and finite");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::domain_error("Params: beta must be positive and finite");
}

double a_eval(double t, const Params& p) {
    if (t < 0.0 || std::isnan(t))
        throw std::domain_error("a_eval: t must be nonnegative");
    if (t == 0.0) return -kInf;
    double r = std::sqrt(t / p.beta);
    return (r - 1.0 / r) / p.alpha;
}

double a_prime(double t, const Params& p) {
    if (!(t > 0.0)) throw std::domain_error("a_prime: t must be positive");
    return (t + p.beta) / (2.0 * p.alpha * std::sqrt(p.beta) * t * std::sqrt(t));
}

double a_second(double t, const Params& p) {
    if (!(t > 0.0)) throw std::domain_error("a_second: t must be positive");
    return -(t + 3.0 * p.beta) / (4.0 * p.alpha * std::sqrt(p.beta) * t * t * std::sqrt(t));
}

double pmf(std::int64_t s, const Params& p) {
    p.validate();
    if (s < 0) return 0.0;
    double lo = a_eval(static_cast<double>(s), p);
    double hi = a_eval(static_cast<double>(s) + 1.0, p);
    // Difference of CDFs cancels badly in either tail; take the branch
    // whose arguments sit on the same side of zero.
    double v;
    if (lo >= 0.0)
        v = normal::ccdf(lo) - normal::ccdf(hi);
    else
        v = normal::cdf(hi) - normal::cdf(lo);
    return std::max(v, 0.0);
}

double cdf(double s, const Params& p) {
    p.validate();
    if (std::isnan(s)) throw std::domain_error("cdf: NaN argument");
    if (s < 0.0) return 0.0;
    return normal::cdf(a_eval(std::floor(s) + 1.0, p));
}

double reliability(double s, const Params& p) {
    p.validate();
    if (std::isnan(s)) throw std::domain_error("reliability: NaN argument");
    if (s < 0.0) return 1.0;
    return normal::ccdf(a_eval(std::floor(s) + 1.0, p));
}

double hazard(std::int64_t s, const Params& p) {
    p.validate();
    if (s < 0) throw std::domain_error("hazard: s must be nonnegative");
    double r_prev = reliability(static_cast<double>(s) - 1.0, p);
    if (r_prev <= 0.0)
        throw std::runtime_error("hazard: survival exhausted to machine precision");
    double r_cur = reliability(static_cast<double>(s), p);
    return 1.0 - r_cur / r_prev;
}

double continuous_quantile(double p, const Params& params) {
    params.validate();
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("continuous_quantile: p must lie in (0,1)");
    double z = params.alpha * normal::quantile(p);
    double w = z + std::sqrt(z * z + 4.0);
    return params.beta * 0.25 * w * w;
}

std::int64_t quantile(double p, const Params& params) {
    double q = continuous_quantile(p, params);
    double r = std::round(q);
    // Floating-point Q_p is never exactly integral; detect the natural-
    // number case by relative tolerance.
    if (r >= 1.0 && std::abs(q - r) < 1e-9 * std::max(1.0, q))
        return static_cast<std::int64_t>(r) - 1;
    return static_cast<std::int64_t>(std::floor(q));
}

std::vector<std::int64_t> sample(std::size_t n, const Params& p, Rng& rng) {
    p.validate();
    std::vector<std::int64_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(static_cast<std::int64_t>(std::floor(continuous_quantile(rng.uniform(), p))));
    return out;
}

std::vector<std::int64_t> sample(std::size_t n, const Params& p, std::uint64_t seed) {
    Rng rng(seed);
    return sample(n, p, rng);
}

namespace {

// Continuous log-density up to a constant: -a(t)^2/2 + log a'(t).
double continuous_logpdf(double t, const Params& p) {
    double a = a_eval(t, p);
    return -0.5 * a * a + std::log(a_prime(t, p));
}

}  // namespace

std::int64_t mode(const Params& p) {
    p.validate();
    // The continuous mode lies in (0, beta]; golden-section search on the
    // log-density, then a local pmf comparison around floor(t0).
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 1e-12 * p.beta, hi = p.beta;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = continuous_logpdf(x1, p), f2 = continuous_logpdf(x2, p);
    while (hi - lo > 1e-10 * std::max(1.0, p.beta)) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = continuous_logpdf(x2, p);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = continuous_logpdf(x1, p);
        }
    }
    auto t0 = static_cast<std::int64_t>(std::floor(0.5 * (lo + hi)));
    std::int64_t best = std::max<std::int64_t>(t0 - 1, 0);
    for (std::int64_t s = best + 1; s <= t0 + 1; ++s)
        if (pmf(s, p) > pmf(best, p)) best = s;
    return best;
}

SeriesValue raw_moment(int r, const Params& p, const TruncationPolicy& policy) {
    p.validate();
    if (r < 1) throw std::domain_error("raw_moment: order must be >= 1");
    // E(S^r) = sum_{s>=0} [(s+1)^r - s^r] R(s); stop once the survival
    // term falls below tail_epsilon relative to the running sum.
    double sum = 0.0;
    double prev_term = 0.0;
    for (std::int64_t s = 0; s < policy.max_terms; ++s) {
        double surv = normal::ccdf(a_eval(static_cast<double>(s) + 1.0, p));
        double ds = static_cast<double>(s);
        double term = (std::pow(ds + 1.0, r) - std::pow(ds, r)) * surv;
        sum += term;
        // once terms decay, bound the remaining tail geometrically; the
        // last term alone badly understates slow tails
        if (prev_term > 0.0 && term < prev_term) {
            double rho = term / prev_term;
            double tail = term * rho / (1.0 - rho);
            if (tail < policy.tail_epsilon * (sum + 1.0)) return {sum, tail};
        }
        prev_term = term;
    }
    throw std::runtime_error("raw_moment: max_terms reached before tail bound; partial value " +
                             std::to_string(sum));
}

SeriesValue variance(const Params& p, const TruncationPolicy& policy) {
    SeriesValue m1 = raw_moment(1, p, policy);
    SeriesValue m2 = raw_moment(2, p, policy);
    return {std::max(m2.value - m1.value * m1.value, 0.0),
            std::max(m1.tail_bound, m2.tail_bound)};
}

SeriesValue mrlf(std::int64_t k, const Params& p, const TruncationPolicy& policy) {
    p.validate();
    if (k < 0) throw std::domain_error("mrlf: k must be nonnegative");
    double r_prev = reliability(static_cast<double>(k) - 1.0, p);
    if (r_prev <= 0.0)
        throw std::runtime_error("mrlf: survival exhausted to machine precision");
    double sum = 0.0, prev_term = 0.0;
    for (std::int64_t s = k; s < k + policy.max_terms; ++s) {
        double surv = reliability(static_cast<double>(s), p);
        sum += surv;
        if (prev_term > 0.0 && surv < prev_term) {
            double rho = surv / prev_term;
            double tail = surv * rho / (1.0 - rho);
            if (tail < policy.tail_epsilon * (sum + 1.0))
                return {sum / r_prev, tail / r_prev};
        }
        prev_term = surv;
    }
    throw std::runtime_error("mrlf: max_terms reached before tail bound");
}

SeriesValue vrlf(std::int64_t k, const Params& p, const TruncationPolicy& policy) {
    p.validate();
    if (k < 0) throw std::domain_error("vrlf: k must be nonnegative");
    double r_prev = reliability(static_cast<double>(k) - 1.0, p);
    if (r_prev <= 0.0)
        throw std::runtime_error("vrlf: survival exhausted to machine precision");
    double sum_s = 0.0, prev_term = 0.0, tail = 0.0;
    std::int64_t s = k;
    for (; s < k + policy.max_terms; ++s) {
        double surv = reliability(static_cast<double>(s), p);
        double term = static_cast<double>(s + 1) * surv;
        sum_s += static_cast<double>(s) * surv;
        if (prev_term > 0.0 && term < prev_term) {
            double rho = term / prev_term;
            tail = term * rho / (1.0 - rho);
            if (tail < policy.tail_epsilon * (sum_s + 1.0)) break;
        }
        prev_term = term;
    }
    if (s == k + policy.max_terms)
        throw std::runtime_error("vrlf: max_terms reached before tail bound");
    double mu = mrlf(k, p, policy).value;
    double v = 2.0 * sum_s / r_prev - (2.0 * static_cast<double>(k) - 1.0) * mu - mu * mu;
    return {std::max(v, 0.0), tail / r_prev};
}

double order_stat_cdf(int i, int n, double s, const Params& p) {
    if (i < 1 || n < 1 || i > n)
        throw std::domain_error("order_stat_cdf: require 1 <= i <= n");
    double f = cdf(s, p);
    double r = reliability(s, p);
    // sum_{k=i}^{n} C(n,k) F^k R^{n-k}, running the binomial coefficient
    // recurrently; n is small in practice.
    double sum = 0.0;
    double coef = 1.0;
    for (int k = 1; k <= n; ++k) {
        coef = coef * static_cast<double>(n - k + 1) / static_cast<double>(k);
        if (k >= i) sum += coef * std::pow(f, k) * std::pow(r, n - k);
    }
    return std::min(sum, 1.0);
}

bool ihr_region_check(const Params& p, const std::vector<double>& t_grid) {
    p.validate();
    if (t_grid.empty()) throw std::domain_error("ihr_region_check: empty grid");
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::domain_error("ihr_region_check: grid points must be positive");
        double ap = a_prime(t, p);
        double c = a_second(t, p) - a_eval(t, p) * ap * ap;
        if (!(c > 0.0)) return false;
    }
    return true;
}

}  // namespace bsd
