#include "bsd/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "bsd/likelihood.hpp"

namespace bsd {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void Dataset::validate() const {
    if (observations.size() < 2)
        throw std::domain_error("Dataset: need at least two observations");
    for (auto s : observations)
        if (s < 0) throw std::domain_error("Dataset: observations must be nonnegative");
    auto [mn, mx] = std::minmax_element(observations.begin(), observations.end());
    if (*mn == *mx)
        throw std::domain_error("Dataset: need at least two distinct values");
}

double loglik(const Dataset& data, const Params& p) {
    p.validate();
    double sum = 0.0;
    for (auto s : data.observations) {
        double prob = pmf(s, p);
        if (!(prob > 0.0)) return kNegInf;
        sum += std::log(prob);
    }
    return sum;
}

Eigen::Vector2d score(const Dataset& data, const Params& p) {
    p.validate();
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (auto s : data.observations) {
        ObsDerivatives d = obs_derivatives(s, p);
        if (!d.valid) return Eigen::Vector2d::Constant(std::numeric_limits<double>::quiet_NaN());
        g(0) += d.d_alpha;
        g(1) += d.d_beta;
    }
    return g;
}

Eigen::Matrix2d hessian(const Dataset& data, const Params& p) {
    p.validate();
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (auto s : data.observations) {
        ObsDerivatives d = obs_derivatives(s, p);
        if (!d.valid) return Eigen::Matrix2d::Constant(std::numeric_limits<double>::quiet_NaN());
        h(0, 0) += d.d2_aa;
        h(0, 1) += d.d2_ab;
        h(1, 1) += d.d2_bb;
    }
    h(1, 0) = h(0, 1);
    return h;
}

Params initial_params(const Dataset& data) {
    std::vector<std::int64_t> sorted = data.observations;
    std::sort(sorted.begin(), sorted.end());
    double median = (sorted.size() % 2 == 1)
                        ? static_cast<double>(sorted[sorted.size() / 2])
                        : 0.5 * static_cast<double>(sorted[sorted.size() / 2 - 1] +
                                                    sorted[sorted.size() / 2]);
    double beta0 = median + 1.0;

    // Modified-moment shape estimate on half-shifted data t_i = s_i + 0.5.
    double m1 = 0.0, inv = 0.0;
    for (auto s : data.observations) {
        double t = static_cast<double>(s) + 0.5;
        m1 += t;
        inv += 1.0 / t;
    }
    m1 /= static_cast<double>(data.size());
    double mneg1 = static_cast<double>(data.size()) / inv;
    double alpha0 = std::sqrt(2.0 * (std::sqrt(m1 / mneg1) - 1.0));
    alpha0 = std::clamp(alpha0, 0.05, 10.0);
    return {alpha0, beta0};
}

FitResult fit(const Dataset& data, std::optional<Params> init, const opt::Options& options) {
    data.validate();
    Params start = init ? *init : initial_params(data);
    start.validate();

    // Optimize in (log alpha, log beta) so positivity needs no constraint
    // handling; gradients and Hessians are chain-ruled accordingly.
    auto to_params = [](const Eigen::VectorXd& u) {
        return Params{std::exp(u(0)), std::exp(u(1))};
    };
    opt::Objective obj;
    obj.value = [&](const Eigen::VectorXd& u) { return loglik(data, to_params(u)); };
    obj.gradient = [&](const Eigen::VectorXd& u) {
        Params p = to_params(u);
        Eigen::Vector2d g = score(data, p);
        return Eigen::VectorXd(Eigen::Vector2d(p.alpha * g(0), p.beta * g(1)));
    };
    obj.hessian = [&](const Eigen::VectorXd& u) {
        Params p = to_params(u);
        Eigen::Vector2d g = score(data, p);
        Eigen::Matrix2d h = hessian(data, p);
        Eigen::Matrix2d out;
        out(0, 0) = p.alpha * p.alpha * h(0, 0) + p.alpha * g(0);
        out(1, 1) = p.beta * p.beta * h(1, 1) + p.beta * g(1);
        out(0, 1) = out(1, 0) = p.alpha * p.beta * h(0, 1);
        return Eigen::MatrixXd(out);
    };

    Eigen::VectorXd u0(2);
    u0 << std::log(start.alpha), std::log(start.beta);
    opt::Result r = opt::maximize(obj, u0, options);

    FitResult fr;
    fr.params = to_params(r.x);
    fr.loglik = r.value;
    fr.converged = r.converged;
    fr.iterations = r.iterations;
    fr.grad_norm = r.grad_norm;
    auto [aic, bic] = information_criteria(fr.loglik, 2, static_cast<int>(data.size()));
    fr.aic = aic;
    fr.bic = bic;

    // Some samples push the likelihood onto the degenerate ridge
    // alpha -> inf, beta -> 0 with alpha*sqrt(beta) fixed, where no
    // maximum exists; the log-coordinate information goes flat along the
    // ridge. Treat such stationary points as non-convergence.
    if (fr.converged) {
        Eigen::Matrix2d lh = obj.hessian(r.x);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(-lh);
        double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
        if (!(lo > 0.0) || hi > 1e6 * lo) fr.converged = false;
    }

    // Observed-information standard errors in the original coordinates.
    Eigen::Matrix2d info = -hessian(data, fr.params);
    Eigen::LLT<Eigen::Matrix2d> llt(info);
    if (llt.info() == Eigen::Success) {
        Eigen::Matrix2d cov = llt.solve(Eigen::Matrix2d::Identity());
        if (cov(0, 0) > 0.0 && cov(1, 1) > 0.0)
            fr.std_errors = Eigen::Vector2d(std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)));
    }
    return fr;
}

std::pair<double, double> information_criteria(double loglik, int k, int n) {
    if (n < 1 || k < 1)
        throw std::domain_error("information_criteria: require n >= 1 and k >= 1");
    return {-2.0 * loglik + 2.0 * k, -2.0 * loglik + k * std::log(static_cast<double>(n))};
}

}  // namespace bsd
