#ifndef BSD_DISTRIBUTION_HPP
#define BSD_DISTRIBUTION_HPP

#include <cstdint>
#include <vector>

namespace bsd {

/// Shape/scale pair of one discrete Birnbaum-Saunders law.
struct Params {
    double alpha;  // shape, > 0
    double beta;   // scale, > 0

    void validate() const;
};

/// Truncation control for the infinite series behind moments and
/// residual-life functions.
struct TruncationPolicy {
    double tail_epsilon = 1e-14;
    std::int64_t max_terms = 10'000'000;
};

/// Series value plus the tail bound at the point the summation stopped.
struct SeriesValue {
    double value;
    double tail_bound;
};

// The normalizing transform a(t) = (sqrt(t/beta) - sqrt(beta/t))/alpha and
// its first two derivatives in t. a(0) is -infinity by convention.
double a_eval(double t, const Params& p);
double a_prime(double t, const Params& p);
double a_second(double t, const Params& p);

double pmf(std::int64_t s, const Params& p);
double cdf(double s, const Params& p);
double reliability(double s, const Params& p);
double hazard(std::int64_t s, const Params& p);

/// Quantile of the underlying continuous law, Q_p.
double continuous_quantile(double p, const Params& params);

/// Integer quantile: Q_p - 1 when Q_p is a natural number, floor(Q_p)
/// otherwise (lower endpoint of the admissible interval).
std::int64_t quantile(double p, const Params& params);

/// Continuous-then-floor mode of the discrete law.
std::int64_t mode(const Params& p);

SeriesValue raw_moment(int r, const Params& p, const TruncationPolicy& policy = {});
SeriesValue variance(const Params& p, const TruncationPolicy& policy = {});

/// Mean residual life E(S - k | S >= k).
SeriesValue mrlf(std::int64_t k, const Params& p, const TruncationPolicy& policy = {});
/// Variance residual life Var(S - k | S >= k).
SeriesValue vrlf(std::int64_t k, const Params& p, const TruncationPolicy& policy = {});

/// CDF of the i-th order statistic out of n i.i.d. draws, evaluated at s.
double order_stat_cdf(int i, int n, double s, const Params& p);

/// Necessary numerical check that the parameters lie in the increasing-
/// hazard region: C(t) = a''(t) - a(t) a'(t)^2 > 0 at every grid point.
bool ihr_region_check(const Params& p, const std::vector<double>& t_grid);

class Rng;
std::vector<std::int64_t> sample(std::size_t n, const Params& p, Rng& rng);
std::vector<std::int64_t> sample(std::size_t n, const Params& p, std::uint64_t seed);

}  // namespace bsd

#endif
