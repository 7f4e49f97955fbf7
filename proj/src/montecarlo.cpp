#include "bsd/montecarlo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bsd/fit.hpp"
#include "bsd/regression.hpp"
#include "bsd/rng.hpp"

namespace bsd::mc {

void StudyConfig::validate() const {
    if (replications < 1) throw std::domain_error("StudyConfig: replications must be >= 1");
    for (int n : sample_sizes)
        if (n < 5) throw std::domain_error("StudyConfig: sample sizes must be >= 5");
    for (double a : alphas)
        if (!(a > 0.0)) throw std::domain_error("StudyConfig: alphas must be positive");
    if (model == Model::dist && !(beta > 0.0))
        throw std::domain_error("StudyConfig: beta must be positive");
}

namespace {

CellResult summarize(int n, double alpha, std::vector<std::string> names,
                     const std::vector<std::vector<double>>& estimates,
                     const std::vector<double>& truth, int replications, int dropped) {
    CellResult cell;
    cell.n = n;
    cell.alpha = alpha;
    cell.parameter_names = std::move(names);
    cell.replications_used = static_cast<int>(estimates.size());
    cell.dropped = dropped;
    cell.flagged = dropped * 10 > replications;

    const auto k = truth.size();
    cell.bias.assign(k, 0.0);
    cell.mse.assign(k, 0.0);
    cell.bias_se.assign(k, 0.0);
    if (estimates.empty()) return cell;
    const auto b = static_cast<double>(estimates.size());
    for (const auto& est : estimates)
        for (std::size_t j = 0; j < k; ++j) {
            double err = est[j] - truth[j];
            cell.bias[j] += err / b;
            cell.mse[j] += err * err / b;
        }
    for (std::size_t j = 0; j < k; ++j) {
        double var = std::max(cell.mse[j] - cell.bias[j] * cell.bias[j], 0.0);
        cell.bias_se[j] = std::sqrt(var / b);
    }
    return cell;
}

}  // namespace

StudyResult run_dist_study(const StudyConfig& config) {
    config.validate();
    if (config.model != Model::dist)
        throw std::domain_error("run_dist_study: config.model must be dist");
    StudyResult result;
    result.config = config;

    std::uint64_t cell_index = 0;
    for (int n : config.sample_sizes)
        for (double alpha : config.alphas) {
            ++cell_index;
            Params truth{alpha, config.beta};
            std::vector<std::vector<double>> estimates;
            estimates.reserve(static_cast<std::size_t>(config.replications));
            int dropped = 0;
            for (int rep = 0; rep < config.replications; ++rep) {
                std::uint64_t seed =
                    derive_seed(config.master_seed, cell_index, static_cast<std::uint64_t>(rep));
                Dataset data{sample(static_cast<std::size_t>(n), truth, seed)};
                try {
                    FitResult fr = fit(data);
                    if (!fr.converged) {
                        ++dropped;
                        continue;
                    }
                    estimates.push_back({fr.params.alpha, fr.params.beta});
                } catch (const std::exception&) {
                    ++dropped;
                }
            }
            result.cells.push_back(summarize(n, alpha, {"alpha", "beta"}, estimates,
                                             {alpha, config.beta}, config.replications, dropped));
        }
    return result;
}

StudyResult run_reg_study(const StudyConfig& config) {
    config.validate();
    if (config.model != Model::regression)
        throw std::domain_error("run_reg_study: config.model must be regression");
    StudyResult result;
    result.config = config;
    const Eigen::Index k = config.eta.size();

    std::uint64_t cell_index = 0;
    for (int n : config.sample_sizes)
        for (double alpha : config.alphas) {
            ++cell_index;
            RegressionParams truth{alpha, config.eta};
            std::vector<std::vector<double>> estimates;
            estimates.reserve(static_cast<std::size_t>(config.replications));
            int dropped = 0;

            // Fixed-design option draws the covariates once per cell.
            Eigen::MatrixXd fixed;
            if (config.fixed_design) {
                Rng rng(derive_seed(config.master_seed, cell_index, 0xFFFFFFFFULL));
                fixed = Eigen::MatrixXd::Ones(n, k);
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 1; j < k; ++j) fixed(i, j) = rng.uniform();
            }

            for (int rep = 0; rep < config.replications; ++rep) {
                std::uint64_t seed =
                    derive_seed(config.master_seed, cell_index, static_cast<std::uint64_t>(rep));
                Rng rng(seed);
                Eigen::MatrixXd design;
                if (config.fixed_design) {
                    design = fixed;
                } else {
                    design = Eigen::MatrixXd::Ones(n, k);
                    for (Eigen::Index i = 0; i < n; ++i)
                        for (Eigen::Index j = 1; j < k; ++j) design(i, j) = rng.uniform();
                }
                RegressionDataset data{simulate_responses(truth, design, rng), design};
                try {
                    RegressionFit fr = reg_fit(data);
                    if (!fr.converged) {
                        ++dropped;
                        continue;
                    }
                    std::vector<double> est;
                    for (Eigen::Index j = 0; j < k; ++j) est.push_back(fr.params.eta(j));
                    est.push_back(fr.params.alpha);
                    estimates.push_back(std::move(est));
                } catch (const std::exception&) {
                    ++dropped;
                }
            }

            std::vector<std::string> names;
            std::vector<double> truth_vec;
            for (Eigen::Index j = 0; j < k; ++j) {
                names.push_back("eta" + std::to_string(j));
                truth_vec.push_back(config.eta(j));
            }
            names.emplace_back("alpha");
            truth_vec.push_back(alpha);
            result.cells.push_back(summarize(n, alpha, std::move(names), estimates, truth_vec,
                                             config.replications, dropped));
        }
    return result;
}

StudyResult run_study(const StudyConfig& config) {
    return config.model == Model::dist ? run_dist_study(config) : run_reg_study(config);
}

std::string to_csv(const StudyResult& result) {
    std::ostringstream os;
    os << "n,alpha,parameter,bias,mse,bias_se,replications_used,dropped,flagged\n";
    os.precision(10);
    for (const auto& cell : result.cells)
        for (std::size_t j = 0; j < cell.parameter_names.size(); ++j)
            os << cell.n << ',' << cell.alpha << ',' << cell.parameter_names[j] << ','
               << cell.bias[j] << ',' << cell.mse[j] << ',' << cell.bias_se[j] << ','
               << cell.replications_used << ',' << cell.dropped << ','
               << (cell.flagged ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace bsd::mc
