#include "bsd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bsd::opt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Result nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                   const Eigen::VectorXd& init, int budget) {
    const int n = static_cast<int>(init.size());
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        double v = f(x);
        return std::isfinite(v) ? v : kNegInf;
    };

    std::vector<Eigen::VectorXd> pts(n + 1, init);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i)
        pts[i + 1](i) += (init(i) != 0.0) ? 0.05 * std::abs(init(i)) + 0.01 : 0.05;
    for (int i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    auto order = [&] {
        for (int i = 1; i <= n; ++i)
            for (int j = i; j > 0 && vals[j] > vals[j - 1]; --j) {
                std::swap(vals[j], vals[j - 1]);
                std::swap(pts[j], pts[j - 1]);
            }
    };
    order();

    while (evals < budget) {
        if (std::isfinite(vals[0]) && std::isfinite(vals[n]) &&
            vals[0] - vals[n] < 1e-12 * (1.0 + std::abs(vals[0])))
            break;
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += pts[i];
        centroid /= n;

        Eigen::VectorXd refl = centroid + (centroid - pts[n]);
        double fr = eval(refl);
        if (fr > vals[0]) {
            Eigen::VectorXd exp_pt = centroid + 2.0 * (centroid - pts[n]);
            double fe = eval(exp_pt);
            if (fe > fr) {
                pts[n] = exp_pt;
                vals[n] = fe;
            } else {
                pts[n] = refl;
                vals[n] = fr;
            }
        } else if (fr > vals[n - 1]) {
            pts[n] = refl;
            vals[n] = fr;
        } else {
            Eigen::VectorXd contr = centroid + 0.5 * (pts[n] - centroid);
            double fc = eval(contr);
            if (fc > vals[n]) {
                pts[n] = contr;
                vals[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
        order();
    }

    Result r;
    r.x = pts[0];
    r.value = vals[0];
    r.iterations = evals;
    r.converged = std::isfinite(vals[0]);
    r.used_fallback = true;
    return r;
}

Result maximize(const Objective& obj, const Eigen::VectorXd& init, const Options& opts) {
    const int n = static_cast<int>(init.size());
    Eigen::VectorXd x = init;
    double f = obj.value(x);
    if (!std::isfinite(f)) {
        // Likelihood already degenerate at the start; hand over to the
        // simplex which tolerates -inf regions.
        Result r = nelder_mead(obj.value, init, opts.simplex_budget);
        Eigen::VectorXd g = obj.gradient(r.x);
        r.grad_norm = g.norm();
        r.converged = r.converged && r.grad_norm < opts.grad_tol * (1.0 + std::abs(r.value)) * 100.0;
        return r;
    }

    int failed_steps = 0;
    Result res;
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        Eigen::VectorXd g = obj.gradient(x);
        double gn = g.norm();
        if (gn < opts.grad_tol * (1.0 + std::abs(f))) {
            res.x = x;
            res.value = f;
            res.grad_norm = gn;
            res.iterations = iter - 1;
            res.converged = true;
            return res;
        }

        Eigen::MatrixXd h = obj.hessian(x);
        // Newton direction for a maximum solves (-H + lambda I) d = g with
        // lambda escalated until d is an ascent direction.
        Eigen::VectorXd dir;
        double lambda = 0.0;
        for (int tries = 0; tries < 40; ++tries) {
            Eigen::MatrixXd m = -h + lambda * Eigen::MatrixXd::Identity(n, n);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
                dir = ldlt.solve(g);
                if (dir.allFinite() && g.dot(dir) > 0.0) break;
            }
            lambda = (lambda == 0.0) ? 1e-8 * (1.0 + h.cwiseAbs().maxCoeff()) : lambda * 10.0;
            dir.resize(0);
        }
        if (dir.size() == 0) dir = g / std::max(gn, 1e-12);

        // Backtracking Armijo line search.
        double step = 1.0;
        bool improved = false;
        double gd = g.dot(dir);
        for (int ls = 0; ls < 40; ++ls) {
            Eigen::VectorXd xc = x + step * dir;
            double fc = obj.value(xc);
            if (std::isfinite(fc) && fc > f + 1e-4 * step * gd) {
                x = xc;
                f = fc;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            if (++failed_steps >= 3) {
                Result nm = nelder_mead(obj.value, x, opts.simplex_budget);
                if (nm.value > f) {
                    x = nm.x;
                    f = nm.value;
                }
                Eigen::VectorXd g2 = obj.gradient(x);
                res.x = x;
                res.value = f;
                res.grad_norm = g2.norm();
                res.iterations = iter;
                res.used_fallback = true;
                res.converged = res.grad_norm < opts.grad_tol * (1.0 + std::abs(f)) * 100.0;
                return res;
            }
        } else {
            failed_steps = 0;
        }
    }

    Eigen::VectorXd g = obj.gradient(x);
    res.x = x;
    res.value = f;
    res.grad_norm = g.norm();
    res.iterations = opts.max_iterations;
    res.converged = false;
    return res;
}

}  // namespace bsd::opt
