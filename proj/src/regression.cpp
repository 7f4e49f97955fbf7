#include "bsd/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "bsd/fit.hpp"
#include "bsd/likelihood.hpp"
#include "bsd/normal.hpp"

namespace bsd {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Type-7 (linear interpolation) quantile of a sorted vector.
double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::domain_error("quantile of empty vector");
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}
}  // namespace

void RegressionDataset::validate() const {
    const auto n = static_cast<Eigen::Index>(responses.size());
    if (design.rows() != n)
        throw std::domain_error("RegressionDataset: design rows must match responses");
    const Eigen::Index p = design.cols() - 1;
    if (n <= p + 2)
        throw std::domain_error("RegressionDataset: need n > p + 2");
    for (auto s : responses)
        if (s < 0) throw std::domain_error("RegressionDataset: responses must be nonnegative");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(design);
    if (lu.rank() < design.cols())
        throw std::domain_error("RegressionDataset: design matrix is rank deficient");
}

void RegressionParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::domain_error("RegressionParams: alpha must be positive and finite");
    if (!eta.allFinite())
        throw std::domain_error("RegressionParams: eta must be finite");
}

double link_beta(const Eigen::VectorXd& design_row, const Eigen::VectorXd& eta) {
    if (design_row.size() != eta.size())
        throw std::domain_error("link_beta: dimension mismatch");
    return std::exp(design_row.dot(eta));
}

double reg_loglik(const RegressionDataset& data, const RegressionParams& p) {
    p.validate();
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double beta_i = link_beta(data.design.row(static_cast<Eigen::Index>(i)), p.eta);
        double prob = pmf(data.responses[i], Params{p.alpha, beta_i});
        if (!(prob > 0.0)) return kNegInf;
        sum += std::log(prob);
    }
    return sum;
}

Eigen::VectorXd reg_score(const RegressionDataset& data, const RegressionParams& p) {
    p.validate();
    const Eigen::Index k = p.eta.size();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(k + 1);
    for (std::size_t i = 0; i < data.size(); ++i) {
        Eigen::VectorXd x = data.design.row(static_cast<Eigen::Index>(i));
        double beta_i = link_beta(x, p.eta);
        ObsDerivatives d = obs_derivatives(data.responses[i], Params{p.alpha, beta_i});
        if (!d.valid)
            return Eigen::VectorXd::Constant(k + 1, std::numeric_limits<double>::quiet_NaN());
        g(0) += d.d_alpha;
        g.tail(k) += d.d_beta * beta_i * x;
    }
    return g;
}

Eigen::MatrixXd reg_hessian(const RegressionDataset& data, const RegressionParams& p) {
    p.validate();
    const Eigen::Index k = p.eta.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (std::size_t i = 0; i < data.size(); ++i) {
        Eigen::VectorXd x = data.design.row(static_cast<Eigen::Index>(i));
        double beta_i = link_beta(x, p.eta);
        ObsDerivatives d = obs_derivatives(data.responses[i], Params{p.alpha, beta_i});
        if (!d.valid)
            return Eigen::MatrixXd::Constant(k + 1, k + 1,
                                             std::numeric_limits<double>::quiet_NaN());
        h(0, 0) += d.d2_aa;
        h.block(0, 1, 1, k) += (d.d2_ab * beta_i * x).transpose();
        // d beta_i/d eta = beta_i x and d2 beta_i = beta_i x x', so the
        // eta block picks up the first-derivative-of-link term as well.
        h.block(1, 1, k, k) +=
            (d.d2_bb * beta_i * beta_i + d.d_beta * beta_i) * (x * x.transpose());
    }
    h.block(1, 0, k, 1) = h.block(0, 1, 1, k).transpose();
    return h;
}

RegressionParams reg_initial_params(const RegressionDataset& data) {
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i)
        y(i) = std::log(static_cast<double>(data.responses[static_cast<std::size_t>(i)]) + 1.0);
    Eigen::VectorXd eta0 = data.design.colPivHouseholderQr().solve(y);

    // Shape start from the modified-moment formula on responses scaled by
    // the initial fitted betas.
    double m1 = 0.0, inv = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double beta_i = link_beta(data.design.row(i), eta0);
        double t = (static_cast<double>(data.responses[static_cast<std::size_t>(i)]) + 0.5) / beta_i;
        m1 += t;
        inv += 1.0 / t;
    }
    m1 /= static_cast<double>(n);
    double mneg1 = static_cast<double>(n) / inv;
    double alpha0 = std::sqrt(std::max(2.0 * (std::sqrt(m1 / mneg1) - 1.0), 0.0));
    alpha0 = std::clamp(alpha0, 0.05, 10.0);
    return {alpha0, eta0};
}

RegressionFit reg_fit(const RegressionDataset& data, std::optional<RegressionParams> init,
                      const opt::Options& options) {
    data.validate();
    RegressionParams start = init ? *init : reg_initial_params(data);
    start.validate();
    const Eigen::Index k = data.design.cols();

    // Work in (log alpha, eta); eta is already unconstrained.
    auto to_params = [&](const Eigen::VectorXd& u) {
        return RegressionParams{std::exp(u(0)), u.tail(k)};
    };
    opt::Objective obj;
    obj.value = [&](const Eigen::VectorXd& u) { return reg_loglik(data, to_params(u)); };
    obj.gradient = [&](const Eigen::VectorXd& u) {
        RegressionParams p = to_params(u);
        Eigen::VectorXd g = reg_score(data, p);
        g(0) *= p.alpha;
        return g;
    };
    obj.hessian = [&](const Eigen::VectorXd& u) {
        RegressionParams p = to_params(u);
        Eigen::VectorXd g = reg_score(data, p);
        Eigen::MatrixXd h = reg_hessian(data, p);
        h(0, 0) = p.alpha * p.alpha * h(0, 0) + p.alpha * g(0);
        h.block(0, 1, 1, k) *= p.alpha;
        h.block(1, 0, k, 1) *= p.alpha;
        return h;
    };

    Eigen::VectorXd u0(k + 1);
    u0(0) = std::log(start.alpha);
    u0.tail(k) = start.eta;
    opt::Result r = opt::maximize(obj, u0, options);

    RegressionFit fr;
    fr.params = to_params(r.x);
    fr.loglik = r.value;
    fr.converged = r.converged;
    fr.iterations = r.iterations;
    fr.grad_norm = r.grad_norm;
    auto [aic, bic] = information_criteria(fr.loglik, static_cast<int>(k) + 1,
                                           static_cast<int>(data.size()));
    fr.aic = aic;
    fr.bic = bic;

    // same degeneracy guard as the plain fit: a flat direction in the
    // log-coordinate information means the likelihood has no maximum
    if (fr.converged) {
        Eigen::MatrixXd lh = obj.hessian(r.x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-lh);
        double lo = es.eigenvalues()(0), hi = es.eigenvalues()(es.eigenvalues().size() - 1);
        if (!(lo > 0.0) || hi > 1e6 * lo) fr.converged = false;
    }

    Eigen::MatrixXd info = -reg_hessian(data, fr.params);
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() == Eigen::Success) {
        Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(k + 1, k + 1));
        if ((cov.diagonal().array() > 0.0).all())
            fr.std_errors = cov.diagonal().array().sqrt().matrix();
    }
    return fr;
}

std::vector<double> residuals(const RegressionFit& fit, const RegressionDataset& data,
                              ResidualKind kind, std::uint64_t seed) {
    if (!fit.converged)
        throw std::domain_error("residuals: fit did not converge");
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(data.size());
    constexpr double tiny = 1e-15;
    for (std::size_t i = 0; i < data.size(); ++i) {
        double beta_i = link_beta(data.design.row(static_cast<Eigen::Index>(i)), fit.params.eta);
        Params p{fit.params.alpha, beta_i};
        double s = static_cast<double>(data.responses[i]);
        double lo = cdf(s - 1.0, p);
        double hi = cdf(s, p);
        double u;
        if (hi - lo <= 0.0) {
            u = 0.5 * (lo + hi);  // degenerate jump; clamp to midpoint
        } else {
            u = lo + rng.uniform() * (hi - lo);
        }
        u = std::clamp(u, tiny, 1.0 - tiny);
        out.push_back(kind == ResidualKind::randomized_quantile ? normal::quantile(u)
                                                                : -std::log1p(-u));
    }
    return out;
}

std::vector<std::int64_t> simulate_responses(const RegressionParams& p,
                                             const Eigen::MatrixXd& design, Rng& rng) {
    p.validate();
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(design.rows()));
    for (Eigen::Index i = 0; i < design.rows(); ++i) {
        double beta_i = link_beta(design.row(i), p.eta);
        double q = continuous_quantile(rng.uniform(), Params{p.alpha, beta_i});
        out.push_back(static_cast<std::int64_t>(std::floor(q)));
    }
    return out;
}

DiagnosticsReport envelope(const RegressionFit& fit, const RegressionDataset& data,
                           int replications, double level, std::uint64_t seed,
                           ResidualKind kind, bool refit_replicates) {
    if (replications < 19)
        throw std::domain_error("envelope: need at least 19 replications");
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("envelope: level must lie in (0,1)");

    const std::size_t n = data.size();
    std::vector<std::vector<double>> bands(n);  // sorted residuals per position
    int dropped = 0;

    for (int b = 0; b < replications; ++b) {
        std::uint64_t rep_seed = derive_seed(seed, 0, static_cast<std::uint64_t>(b) + 1);
        Rng rng(rep_seed);
        RegressionDataset sim{simulate_responses(fit.params, data.design, rng), data.design};

        RegressionFit use = fit;
        if (refit_replicates) {
            try {
                use = reg_fit(sim, fit.params);
            } catch (const std::exception&) {
                ++dropped;
                continue;
            }
            if (!use.converged) {
                ++dropped;
                continue;
            }
        }
        std::vector<double> res = residuals(use, sim, kind, derive_seed(rep_seed, 1, 0));
        std::sort(res.begin(), res.end());
        for (std::size_t i = 0; i < n; ++i) bands[i].push_back(res[i]);
    }
    if (dropped > replications / 5)
        throw std::runtime_error("envelope: more than 20% of replicate fits failed");

    DiagnosticsReport rep;
    rep.residual_kind = kind;
    rep.residuals = residuals(fit, data, kind, derive_seed(seed, 2, 0));
    std::sort(rep.residuals.begin(), rep.residuals.end());
    rep.level = level;
    rep.replications = replications;
    rep.dropped_replicates = dropped;
    rep.seed = seed;
    rep.envelope_lower.resize(n);
    rep.envelope_median.resize(n);
    rep.envelope_upper.resize(n);
    double q_lo = 0.5 * (1.0 - level), q_hi = 0.5 * (1.0 + level);
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(bands[i].begin(), bands[i].end());
        rep.envelope_lower[i] = sorted_quantile(bands[i], q_lo);
        rep.envelope_median[i] = sorted_quantile(bands[i], 0.5);
        rep.envelope_upper[i] = sorted_quantile(bands[i], q_hi);
    }
    return rep;
}

}  // namespace bsd
