#ifndef BSD_MONTECARLO_HPP
#define BSD_MONTECARLO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace bsd::mc {

enum class Model { dist, regression };

struct StudyConfig {
    Model model = Model::dist;
    std::vector<int> sample_sizes{10, 50, 150, 400};
    std::vector<double> alphas{0.5, 1.5, 2.5, 3.0};
    double beta = 2.0;                 // dist study truth
    Eigen::VectorXd eta = (Eigen::VectorXd(2) << 0.2, 1.5).finished();  // regression truth
    int replications = 1000;
    std::uint64_t master_seed = 20240101;
    bool fixed_design = false;         // regression: reuse one covariate draw

    void validate() const;
};

struct CellResult {
    int n = 0;
    double alpha = 0.0;
    std::vector<std::string> parameter_names;
    std::vector<double> bias;
    std::vector<double> mse;
    std::vector<double> bias_se;  // Monte Carlo standard error of the bias
    int replications_used = 0;
    int dropped = 0;
    bool flagged = false;  // more than 10% of replicates failed to converge
};

struct StudyResult {
    StudyConfig config;
    std::vector<CellResult> cells;
};

StudyResult run_dist_study(const StudyConfig& config);
StudyResult run_reg_study(const StudyConfig& config);
StudyResult run_study(const StudyConfig& config);

std::string to_csv(const StudyResult& result);

}  // namespace bsd::mc

#endif
