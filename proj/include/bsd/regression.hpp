#ifndef BSD_REGRESSION_HPP
#define BSD_REGRESSION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "bsd/distribution.hpp"
#include "bsd/optimize.hpp"
#include "bsd/rng.hpp"

namespace bsd {

/// Count responses with a design matrix (intercept column included).
struct RegressionDataset {
    std::vector<std::int64_t> responses;
    Eigen::MatrixXd design;  // n x (p+1)

    std::size_t size() const { return responses.size(); }
    void validate() const;
};

/// Shared shape alpha plus coefficients eta; beta_i = exp(x_i' eta).
struct RegressionParams {
    double alpha;
    Eigen::VectorXd eta;

    void validate() const;
};

struct RegressionFit {
    RegressionParams params{};
    std::optional<Eigen::VectorXd> std_errors;  // (alpha, eta...) order
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
};

enum class ResidualKind { randomized_quantile, generalized_cox_snell };

struct DiagnosticsReport {
    ResidualKind residual_kind{};
    std::vector<double> residuals;  // sorted observed residuals
    std::vector<double> envelope_lower, envelope_median, envelope_upper;
    double level = 0.0;
    int replications = 0;
    int dropped_replicates = 0;
    std::uint64_t seed = 0;
};

double link_beta(const Eigen::VectorXd& design_row, const Eigen::VectorXd& eta);

double reg_loglik(const RegressionDataset& data, const RegressionParams& p);
Eigen::VectorXd reg_score(const RegressionDataset& data, const RegressionParams& p);
Eigen::MatrixXd reg_hessian(const RegressionDataset& data, const RegressionParams& p);

RegressionParams reg_initial_params(const RegressionDataset& data);

RegressionFit reg_fit(const RegressionDataset& data,
                      std::optional<RegressionParams> init = std::nullopt,
                      const opt::Options& options = {});

/// Randomized-quantile or generalized Cox-Snell residuals; both share the
/// same uniform randomization over the CDF jump at each response.
std::vector<double> residuals(const RegressionFit& fit, const RegressionDataset& data,
                              ResidualKind kind, std::uint64_t seed);

/// Simulate one response vector from the fitted model on the same design.
std::vector<std::int64_t> simulate_responses(const RegressionParams& p,
                                             const Eigen::MatrixXd& design, Rng& rng);

DiagnosticsReport envelope(const RegressionFit& fit, const RegressionDataset& data,
                           int replications, double level, std::uint64_t seed,
                           ResidualKind kind = ResidualKind::randomized_quantile,
                           bool refit_replicates = true);

}  // namespace bsd

#endif
