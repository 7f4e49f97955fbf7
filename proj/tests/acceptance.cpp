// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria involving Monte Carlo are stochastic but fully seeded.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <vector>

#include "bsd/csv.hpp"
#include "bsd/distribution.hpp"
#include "bsd/fit.hpp"
#include "bsd/montecarlo.hpp"
#include "bsd/normal.hpp"
#include "bsd/regression.hpp"
#include "bsd/rng.hpp"

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%-60s %s%s%s\n", name.c_str(), ok ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    if (!ok) ++failures;
}

bool close_rel(double got, double want, double rel) {
    return std::abs(got - want) <= rel * std::abs(want);
}

constexpr std::uint64_t kMasterSeed = 20240815;  // documented master seed

// ---- criterion 1: Table-1 cells -----------------------------------------
void criterion_table1() {
    bsd::mc::StudyConfig cfg;
    cfg.model = bsd::mc::Model::dist;
    cfg.beta = 2.0;
    cfg.replications = 1000;
    cfg.master_seed = kMasterSeed;

    cfg.sample_sizes = {400};
    cfg.alphas = {0.5};
    auto r1 = bsd::mc::run_dist_study(cfg).cells[0];
    bool ok = std::abs(r1.bias[0] - (-0.0002)) <= 3.0 * r1.bias_se[0] &&
              std::abs(r1.bias[1] - (-0.0013)) <= 3.0 * r1.bias_se[1] &&
              close_rel(r1.mse[0], 0.0004, 0.30) && close_rel(r1.mse[1], 0.0026, 0.30);
    char buf[160];
    std::snprintf(buf, sizeof buf, "bias=(%.4f,%.4f) mse=(%.4f,%.4f)", r1.bias[0], r1.bias[1],
                  r1.mse[0], r1.mse[1]);
    report("1a. dist study n=400 alpha=0.5 vs published cell", ok, buf);

    cfg.sample_sizes = {50};
    cfg.alphas = {3.0};
    auto r2 = bsd::mc::run_dist_study(cfg).cells[0];
    bool ok2 = std::abs(r2.bias[0] - (-0.2351)) <= 3.0 * r2.bias_se[0] &&
               std::abs(r2.bias[1] - 0.4059) <= 3.0 * r2.bias_se[1] &&
               close_rel(r2.mse[0], 0.2279, 0.30) && close_rel(r2.mse[1], 0.5581, 0.30);
    std::snprintf(buf, sizeof buf, "bias=(%.4f,%.4f) mse=(%.4f,%.4f)", r2.bias[0], r2.bias[1],
                  r2.mse[0], r2.mse[1]);
    report("1b. dist study n=50 alpha=3.0 vs published cell", ok2, buf);
}

// ---- criterion 2: Table-2 cell ------------------------------------------
void criterion_table2() {
    bsd::mc::StudyConfig cfg;
    cfg.model = bsd::mc::Model::regression;
    cfg.replications = 1000;
    cfg.master_seed = kMasterSeed;
    cfg.sample_sizes = {400};
    cfg.alphas = {0.5};
    auto cell = bsd::mc::run_reg_study(cfg).cells[0];
    const double want_bias[3] = {-0.0007, 0.0011, -0.0009};
    const double want_mse[3] = {0.0030, 0.0078, 0.0004};
    bool ok = true;
    for (int j = 0; j < 3; ++j) {
        ok = ok && std::abs(cell.bias[j] - want_bias[j]) <= 3.0 * cell.bias_se[j];
        ok = ok && close_rel(cell.mse[j], want_mse[j], 0.30);
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "bias=(%.4f,%.4f,%.4f) mse=(%.4f,%.4f,%.4f)", cell.bias[0],
                  cell.bias[1], cell.bias[2], cell.mse[0], cell.mse[1], cell.mse[2]);
    report("2.  regression study n=400 alpha=0.5 vs published cell", ok, buf);
}

// ---- criterion 3: case studies, conditional on sourced data -------------
void criterion_case_studies() {
    namespace fs = std::filesystem;
    bool any = false;
    if (fs::exists("data/metal.csv")) {
        any = true;
        auto table = bsd::io::read_table("data/metal.csv", true, ',');
        auto data = bsd::io::make_dataset(table, {});
        auto fr = bsd::fit(data);
        bool ok = fr.converged && close_rel(fr.params.alpha, 1.0840, 0.005) &&
                  close_rel(fr.params.beta, 595.1987, 0.005) &&
                  close_rel(fr.aic, 714.8548, 0.005) && close_rel(fr.bic, 718.5121, 0.005);
        char buf[160];
        std::snprintf(buf, sizeof buf, "alpha=%.4f beta=%.4f aic=%.4f", fr.params.alpha,
                      fr.params.beta, fr.aic);
        report("3a. metal-specimen case study", ok, buf);
    }
    if (fs::exists("data/concrete.csv")) {
        any = true;
        auto table = bsd::io::read_table("data/concrete.csv", true, ',');
        bsd::io::IngestOptions opts;
        opts.response = "y";
        opts.covariates = {"x"};
        auto data = bsd::io::make_regression_dataset(table, opts);
        auto fr = bsd::reg_fit(data);
        bool ok = fr.converged && close_rel(fr.params.alpha, 0.4966, 0.01) &&
                  close_rel(fr.params.eta(0), 27.4913, 0.01) &&
                  close_rel(fr.params.eta(1), -23.9647, 0.01);
        char buf[160];
        std::snprintf(buf, sizeof buf, "alpha=%.4f eta0=%.4f eta1=%.4f", fr.params.alpha,
                      fr.params.eta(0), fr.params.eta(1));
        report("3b. concrete-specimen case study", ok, buf);
    }
    if (!any)
        std::printf("%-60s SKIP  case-study data not available; covered by criteria 4-8\n",
                    "3.  case studies (external data)");
}

// ---- criterion 4: analytic derivatives ----------------------------------
void criterion_derivatives() {
    std::mt19937_64 gen(321);
    std::uniform_real_distribution<double> ua(0.3, 2.5), ub(0.8, 12.0), ue(-0.5, 1.5);
    bool grad_ok = true, hess_ok = true, sym_ok = true;

    for (int trial = 0; trial < 25; ++trial) {  // plain model
        bsd::Params truth{ua(gen), ub(gen)};
        bsd::Dataset data{bsd::sample(60, truth, gen())};
        bsd::Params at{ua(gen), ub(gen)};
        if (!std::isfinite(bsd::loglik(data, at))) continue;

        double ha = 1e-6 * at.alpha, hb = 1e-6 * at.beta;
        Eigen::Vector2d gfd;
        gfd(0) = (bsd::loglik(data, {at.alpha + ha, at.beta}) -
                  bsd::loglik(data, {at.alpha - ha, at.beta})) / (2.0 * ha);
        gfd(1) = (bsd::loglik(data, {at.alpha, at.beta + hb}) -
                  bsd::loglik(data, {at.alpha, at.beta - hb})) / (2.0 * hb);
        Eigen::Vector2d g = bsd::score(data, at);
        grad_ok = grad_ok && (g - gfd).norm() <= 1e-6 * (1.0 + gfd.norm());

        Eigen::Matrix2d hfd;
        hfd.col(0) = (bsd::score(data, {at.alpha + ha, at.beta}) -
                      bsd::score(data, {at.alpha - ha, at.beta})) / (2.0 * ha);
        hfd.col(1) = (bsd::score(data, {at.alpha, at.beta + hb}) -
                      bsd::score(data, {at.alpha, at.beta - hb})) / (2.0 * hb);
        hfd = 0.5 * (hfd + hfd.transpose()).eval();
        Eigen::Matrix2d h = bsd::hessian(data, at);
        sym_ok = sym_ok && h(0, 1) == h(1, 0);
        hess_ok = hess_ok && (h - hfd).norm() <= 1e-5 * (1.0 + hfd.norm());
    }

    for (int trial = 0; trial < 25; ++trial) {  // regression model
        Eigen::VectorXd eta(2);
        eta << ue(gen) + 0.7, ue(gen);
        bsd::RegressionParams truth{ua(gen), eta};
        bsd::Rng rng(gen());
        Eigen::MatrixXd design = Eigen::MatrixXd::Ones(80, 2);
        for (Eigen::Index i = 0; i < 80; ++i) design(i, 1) = rng.uniform();
        bsd::RegressionDataset data{bsd::simulate_responses(truth, design, rng), design};
        Eigen::VectorXd eta_at(2);
        eta_at << ue(gen) + 0.7, ue(gen);
        bsd::RegressionParams at{ua(gen), eta_at};
        if (!std::isfinite(bsd::reg_loglik(data, at))) continue;

        Eigen::VectorXd gfd(3);
        double ha = 1e-6 * at.alpha;
        gfd(0) = (bsd::reg_loglik(data, {at.alpha + ha, at.eta}) -
                  bsd::reg_loglik(data, {at.alpha - ha, at.eta})) / (2.0 * ha);
        for (int j = 0; j < 2; ++j) {
            auto up = at, dn = at;
            up.eta(j) += 1e-6;
            dn.eta(j) -= 1e-6;
            gfd(j + 1) = (bsd::reg_loglik(data, up) - bsd::reg_loglik(data, dn)) / 2e-6;
        }
        Eigen::VectorXd g = bsd::reg_score(data, at);
        grad_ok = grad_ok && (g - gfd).norm() <= 1e-6 * (1.0 + gfd.norm());

        Eigen::MatrixXd hfd(3, 3);
        hfd.col(0) = (bsd::reg_score(data, {at.alpha + ha, at.eta}) -
                      bsd::reg_score(data, {at.alpha - ha, at.eta})) / (2.0 * ha);
        for (int j = 0; j < 2; ++j) {
            auto up = at, dn = at;
            up.eta(j) += 1e-6;
            dn.eta(j) -= 1e-6;
            hfd.col(j + 1) = (bsd::reg_score(data, up) - bsd::reg_score(data, dn)) / 2e-6;
        }
        hfd = 0.5 * (hfd + hfd.transpose()).eval();
        Eigen::MatrixXd h = bsd::reg_hessian(data, at);
        sym_ok = sym_ok && (h - h.transpose()).norm() == 0.0;
        hess_ok = hess_ok && (h - hfd).norm() <= 1e-5 * (1.0 + hfd.norm());
    }

    report("4a. score matches finite differences (50 instances)", grad_ok);
    report("4b. hessian matches finite differences (50 instances)", hess_ok);
    report("4c. hessians exactly symmetric", sym_ok);
}

// ---- criterion 5: distribution property suite ---------------------------
void criterion_distribution_properties() {
    const std::vector<double> alphas{0.3, 0.5, 1.0, 2.0, 3.0};
    const std::vector<double> betas{0.5, 1.0, 2.0, 10.0, 100.0};
    bool norm_ok = true, tele_ok = true, sandwich_ok = true, unimodal_ok = true;
    bool mode_ok = true, anchors_ok = true, hazprod_ok = true;

    for (double alpha : alphas)
        for (double beta : betas) {
            bsd::Params p{alpha, beta};
            std::int64_t N = 1;
            while (bsd::reliability(static_cast<double>(N), p) > 1e-10) N *= 2;
            N = N * 2 + 10;

            double sum = 0.0;
            int sign_changes = 0, prev_sign = 0;
            double prod = 1.0;
            for (std::int64_t s = 0; s <= N; ++s) {
                sum += bsd::pmf(s, p);
                double diff = bsd::pmf(s + 1, p) - bsd::pmf(s, p);
                int sign = (diff > 1e-16) ? 1 : (diff < -1e-16 ? -1 : 0);
                if (sign != 0) {
                    if (prev_sign != 0 && sign != prev_sign) ++sign_changes;
                    prev_sign = sign;
                }
                if (s <= 60 && bsd::reliability(static_cast<double>(s) - 1.0, p) > 1e-10) {
                    prod *= 1.0 - bsd::hazard(s, p);
                    hazprod_ok = hazprod_ok &&
                                 std::abs(bsd::reliability(static_cast<double>(s), p) - prod) <= 1e-10;
                }
            }
            norm_ok = norm_ok && std::abs(sum + bsd::reliability(static_cast<double>(N), p) - 1.0) <= 1e-12;
            tele_ok = tele_ok &&
                      std::abs(sum - bsd::normal::cdf(bsd::a_eval(static_cast<double>(N + 1), p))) <= 1e-12;
            unimodal_ok = unimodal_ok && sign_changes <= 1;

            for (double prob = 0.01; prob < 1.0; prob += 0.01) {
                std::int64_t q = bsd::quantile(prob, p);
                sandwich_ok = sandwich_ok && bsd::cdf(static_cast<double>(q) - 1.0, p) <= prob + 1e-12 &&
                              bsd::cdf(static_cast<double>(q), p) >= prob - 1e-12;
            }
            mode_ok = mode_ok && bsd::mode(p) <= static_cast<std::int64_t>(std::floor(beta));
            anchors_ok = anchors_ok &&
                         std::abs(bsd::mrlf(0, p).value - bsd::raw_moment(1, p).value) <= 1e-8 &&
                         std::abs(bsd::vrlf(0, p).value - bsd::variance(p).value) <= 1e-8;
        }

    report("5a. normalization on 25-point grid", norm_ok);
    report("5b. telescoping on 25-point grid", tele_ok);
    report("5c. quantile sandwich on 25-point grid", sandwich_ok);
    report("5d. unimodality (single sign change)", unimodal_ok);
    report("5e. mode <= floor(beta)", mode_ok);
    report("5f. mrlf(0)=mean, vrlf(0)=variance", anchors_ok);
    report("5g. corrected hazard-product identity", hazprod_ok);
}

// ---- criterion 6: oracle equivalence ------------------------------------
void criterion_oracles() {
    bsd::Params p{0.5, 2.0};
    bool mom_ok = true;
    for (int r = 1; r <= 3; ++r) {
        double direct = 0.0;
        for (std::int64_t s = 0; s <= 200; ++s)
            direct += std::pow(static_cast<double>(s), r) * bsd::pmf(s, p);
        mom_ok = mom_ok && std::abs(bsd::raw_moment(r, p).value - direct) <= 1e-6;
    }
    report("6a. raw_moment r=1,2,3 vs direct summation", mom_ok);

    const int reps = 100000, n = 5;
    bsd::Rng rng(kMasterSeed);
    const int idx[3] = {1, 3, 5};
    std::vector<std::vector<int>> counts(3, std::vector<int>(41, 0));
    for (int rep = 0; rep < reps; ++rep) {
        auto draw = bsd::sample(n, p, rng);
        std::sort(draw.begin(), draw.end());
        for (int j = 0; j < 3; ++j)
            for (std::int64_t s = draw[idx[j] - 1]; s <= 40; ++s) ++counts[j][static_cast<std::size_t>(s)];
    }
    bool os_ok = true;
    for (int j = 0; j < 3; ++j) {
        double ks = 0.0;
        for (int s = 0; s <= 40; ++s)
            ks = std::max(ks, std::abs(static_cast<double>(counts[j][s]) / reps -
                                       bsd::order_stat_cdf(idx[j], n, s, p)));
        os_ok = os_ok && ks < 0.01;
    }
    report("6b. order_stat_cdf vs 1e5-sample simulation", os_ok);
}

// ---- criterion 7: consistency at n = 1e5 --------------------------------
void criterion_consistency() {
    {
        bsd::Dataset data{bsd::sample(100000, bsd::Params{0.5, 2.0}, kMasterSeed)};
        auto fr = bsd::fit(data);
        bool ok = fr.converged && fr.std_errors &&
                  std::abs(fr.params.alpha - 0.5) <= 3.0 * (*fr.std_errors)(0) &&
                  std::abs(fr.params.beta - 2.0) <= 3.0 * (*fr.std_errors)(1);
        char buf[120];
        std::snprintf(buf, sizeof buf, "alpha=%.4f beta=%.4f", fr.params.alpha, fr.params.beta);
        report("7a. plain fit at n=1e5 recovers (0.5, 2)", ok, buf);
    }
    {
        Eigen::VectorXd eta(2);
        eta << 0.2, 1.5;
        bsd::RegressionParams truth{0.5, eta};
        bsd::Rng rng(kMasterSeed + 1);
        Eigen::MatrixXd design = Eigen::MatrixXd::Ones(100000, 2);
        for (Eigen::Index i = 0; i < design.rows(); ++i) design(i, 1) = rng.uniform();
        bsd::RegressionDataset data{bsd::simulate_responses(truth, design, rng), design};
        auto fr = bsd::reg_fit(data);
        bool ok = fr.converged && fr.std_errors &&
                  std::abs(fr.params.alpha - 0.5) <= 3.0 * (*fr.std_errors)(0) &&
                  std::abs(fr.params.eta(0) - 0.2) <= 3.0 * (*fr.std_errors)(1) &&
                  std::abs(fr.params.eta(1) - 1.5) <= 3.0 * (*fr.std_errors)(2);
        char buf[120];
        std::snprintf(buf, sizeof buf, "alpha=%.4f eta=(%.4f,%.4f)", fr.params.alpha,
                      fr.params.eta(0), fr.params.eta(1));
        report("7b. regression fit at n=1e5 recovers (0.5, 0.2, 1.5)", ok, buf);
    }
}

// ---- criterion 8: residual calibration ----------------------------------
void criterion_residuals() {
    Eigen::VectorXd eta(2);
    eta << 0.2, 1.5;
    bsd::RegressionParams truth{0.5, eta};

    double mean_acc = 0.0, skew_acc = 0.0;
    int used = 0;
    for (int seed = 0; seed < 20; ++seed) {
        bsd::Rng rng(1000 + static_cast<std::uint64_t>(seed));
        Eigen::MatrixXd design = Eigen::MatrixXd::Ones(500, 2);
        for (Eigen::Index i = 0; i < 500; ++i) design(i, 1) = rng.uniform();
        bsd::RegressionDataset data{bsd::simulate_responses(truth, design, rng), design};
        auto fr = bsd::reg_fit(data);
        if (!fr.converged) continue;
        auto res = bsd::residuals(fr, data, bsd::ResidualKind::randomized_quantile,
                                  2000 + static_cast<std::uint64_t>(seed));
        double m = 0.0, m2 = 0.0, m3 = 0.0;
        for (double v : res) m += v;
        m /= static_cast<double>(res.size());
        for (double v : res) {
            m2 += (v - m) * (v - m);
            m3 += (v - m) * (v - m) * (v - m);
        }
        m2 /= static_cast<double>(res.size());
        m3 /= static_cast<double>(res.size());
        mean_acc += m;
        skew_acc += m3 / std::pow(m2, 1.5);
        ++used;
    }
    mean_acc /= used;
    skew_acc /= used;
    bool ok = std::abs(mean_acc) < 0.1 && std::abs(skew_acc) < 0.25;
    char buf[120];
    std::snprintf(buf, sizeof buf, "mean=%.4f skew=%.4f over %d seeds", mean_acc, skew_acc, used);
    report("8a. randomized-quantile residual calibration", ok, buf);

    // envelope calibration: pooled coverage across 20 well-specified datasets
    std::size_t inside = 0, total = 0;
    for (int seed = 770; seed < 790; ++seed) {
        bsd::Rng rng(static_cast<std::uint64_t>(seed));
        Eigen::MatrixXd design = Eigen::MatrixXd::Ones(300, 2);
        for (Eigen::Index i = 0; i < 300; ++i) design(i, 1) = rng.uniform();
        bsd::RegressionDataset data{bsd::simulate_responses(truth, design, rng), design};
        auto fr = bsd::reg_fit(data);
        if (!fr.converged) continue;
        auto rep = bsd::envelope(fr, data, 200, 0.95, 888);
        for (std::size_t i = 0; i < rep.residuals.size(); ++i)
            if (rep.residuals[i] >= rep.envelope_lower[i] && rep.residuals[i] <= rep.envelope_upper[i])
                ++inside;
        total += rep.residuals.size();
    }
    bool env_ok = total > 0 && static_cast<double>(inside) >= 0.9 * static_cast<double>(total);
    char buf2[80];
    std::snprintf(buf2, sizeof buf2, "%zu/%zu inside 95%% bands", inside, total);
    report("8b. envelope coverage of a well-specified model", env_ok, buf2);
}

}  // namespace

int main() {
    std::printf("acceptance suite (master seed %llu)\n",
                static_cast<unsigned long long>(kMasterSeed));
    criterion_derivatives();
    criterion_distribution_properties();
    criterion_oracles();
    criterion_consistency();
    criterion_residuals();
    criterion_case_studies();
    criterion_table1();
    criterion_table2();
    std::printf("%s (%d failure%s)\n", failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT",
                failures, failures == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
}
