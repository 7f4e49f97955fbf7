#ifndef BSD_OPTIMIZE_HPP
#define BSD_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <functional>

namespace bsd::opt {

/// Objective with analytic derivatives, to be maximized over an
/// unconstrained coordinate vector.
struct Objective {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

struct Options {
    double grad_tol = 1e-8;      // relative: ||g|| < grad_tol * (1 + |f|)
    int max_iterations = 200;
    int simplex_budget = 2000;   // evaluation budget of the fallback
};

struct Result {
    Eigen::VectorXd x;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool used_fallback = false;
};

/// Safeguarded Newton ascent with backtracking line search; falls back
/// to a Nelder-Mead simplex after three consecutive failed steps.
Result maximize(const Objective& obj, const Eigen::VectorXd& init, const Options& opts = {});

/// Derivative-free Nelder-Mead maximization.
Result nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                   const Eigen::VectorXd& init, int budget);

}  // namespace bsd::opt

#endif
