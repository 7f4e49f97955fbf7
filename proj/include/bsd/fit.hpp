#ifndef BSD_FIT_HPP
#define BSD_FIT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "bsd/distribution.hpp"
#include "bsd/optimize.hpp"

namespace bsd {

/// An i.i.d. sample of nonnegative integer lifetimes.
struct Dataset {
    std::vector<std::int64_t> observations;

    std::size_t size() const { return observations.size(); }
    void validate() const;
};

struct FitResult {
    Params params{};
    std::optional<Eigen::Vector2d> std_errors;  // absent when the observed
                                                // information is singular
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
};

double loglik(const Dataset& data, const Params& p);
Eigen::Vector2d score(const Dataset& data, const Params& p);
Eigen::Matrix2d hessian(const Dataset& data, const Params& p);

/// Moment-based starting point (median + 1 for beta, modified-moment
/// alpha on half-shifted data).
Params initial_params(const Dataset& data);

FitResult fit(const Dataset& data, std::optional<Params> init = std::nullopt,
              const opt::Options& options = {});

/// (AIC, BIC) = (-2 l + 2k, -2 l + k log n).
std::pair<double, double> information_criteria(double loglik, int k, int n);

}  // namespace bsd

#endif
