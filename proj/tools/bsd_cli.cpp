#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "bsd/csv.hpp"
#include "bsd/distribution.hpp"
#include "bsd/fit.hpp"
#include "bsd/montecarlo.hpp"
#include "bsd/regression.hpp"

using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitNumerical = 4;

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::ostringstream os;
    os << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json base_report(const std::string& command, std::uint64_t seed) {
    json report;
    report["schema_version"] = "1";
    report["command"] = command;
    report["timestamp"] = timestamp();
    report["seed"] = seed;
    report["warnings"] = json::array();
    return report;
}

std::string echo_command(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

void write_json(const std::string& path, const json& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << report.dump(2) << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

json fit_payload(const bsd::FitResult& fr) {
    json j;
    j["alpha"] = fr.params.alpha;
    j["beta"] = fr.params.beta;
    if (fr.std_errors) {
        j["std_error_alpha"] = (*fr.std_errors)(0);
        j["std_error_beta"] = (*fr.std_errors)(1);
    }
    j["loglik"] = fr.loglik;
    j["aic"] = fr.aic;
    j["bic"] = fr.bic;
    j["converged"] = fr.converged;
    j["iterations"] = fr.iterations;
    j["grad_norm"] = fr.grad_norm;
    return j;
}

json reg_fit_payload(const bsd::RegressionFit& fr) {
    json j;
    j["alpha"] = fr.params.alpha;
    j["eta"] = std::vector<double>(fr.params.eta.data(),
                                   fr.params.eta.data() + fr.params.eta.size());
    if (fr.std_errors)
        j["std_errors"] = std::vector<double>(fr.std_errors->data(),
                                              fr.std_errors->data() + fr.std_errors->size());
    j["loglik"] = fr.loglik;
    j["aic"] = fr.aic;
    j["bic"] = fr.bic;
    j["converged"] = fr.converged;
    j["iterations"] = fr.iterations;
    j["grad_norm"] = fr.grad_norm;
    return j;
}

bsd::mc::StudyConfig parse_study_config(const json& j) {
    bsd::mc::StudyConfig cfg;
    std::string model = j.at("model");
    if (model == "dist")
        cfg.model = bsd::mc::Model::dist;
    else if (model == "regression")
        cfg.model = bsd::mc::Model::regression;
    else
        throw std::runtime_error("config model must be 'dist' or 'regression'");
    cfg.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
    cfg.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("beta")) cfg.beta = j["beta"];
    if (j.contains("eta")) {
        auto v = j["eta"].get<std::vector<double>>();
        cfg.eta = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    cfg.replications = j.at("replications");
    cfg.master_seed = j.at("master_seed");
    if (j.contains("fixed_design")) cfg.fixed_design = j["fixed_design"];
    return cfg;
}

json study_payload(const bsd::mc::StudyResult& result) {
    json cells = json::array();
    for (const auto& cell : result.cells) {
        json c;
        c["n"] = cell.n;
        c["alpha"] = cell.alpha;
        c["parameters"] = cell.parameter_names;
        c["bias"] = cell.bias;
        c["mse"] = cell.mse;
        c["bias_se"] = cell.bias_se;
        c["replications_used"] = cell.replications_used;
        c["dropped"] = cell.dropped;
        c["flagged"] = cell.flagged;
        cells.push_back(c);
    }
    return cells;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Birnbaum-Saunders distribution toolkit"};
    app.require_subcommand(1);
    const std::string command = echo_command(argc, argv);

    // dist: pointwise distribution queries
    auto* dist = app.add_subcommand("dist", "Evaluate distribution quantities");
    std::string dist_what;
    double d_alpha = 0, d_beta = 0, d_p = 0.5, d_s = 0;
    int d_r = 1;
    bool d_have_s = false, d_have_p = false;
    dist->add_option("what", dist_what, "pmf|cdf|quantile|mean|var|mode|hazard")->required();
    dist->add_option("--alpha", d_alpha, "shape")->required();
    dist->add_option("--beta", d_beta, "scale")->required();
    dist->add_option("--s", d_s)->each([&](const std::string&) { d_have_s = true; });
    dist->add_option("--p", d_p)->each([&](const std::string&) { d_have_p = true; });
    dist->add_option("--r", d_r, "moment order for mean queries");

    // sample
    auto* smp = app.add_subcommand("sample", "Draw a seeded sample");
    double s_alpha = 0, s_beta = 0;
    std::size_t s_n = 0;
    std::uint64_t s_seed = 0;
    smp->add_option("--alpha", s_alpha)->required();
    smp->add_option("--beta", s_beta)->required();
    smp->add_option("--n", s_n)->required();
    smp->add_option("--seed", s_seed)->required();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit of (alpha, beta)");
    std::string f_data, f_response, f_json;
    std::uint64_t f_seed = 0;
    fit_cmd->add_option("--data", f_data)->required();
    fit_cmd->add_option("--response", f_response);
    fit_cmd->add_option("--seed", f_seed);
    fit_cmd->add_option("--json", f_json, "write a JSON report here");

    // regress
    auto* reg_cmd = app.add_subcommand("regress", "Log-link regression fit");
    std::string r_data, r_response, r_covs, r_json;
    bool r_no_intercept = false;
    reg_cmd->add_option("--data", r_data)->required();
    reg_cmd->add_option("--response", r_response)->required();
    reg_cmd->add_option("--covariates", r_covs);
    reg_cmd->add_flag("--no-intercept", r_no_intercept);
    reg_cmd->add_option("--json", r_json);

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "Residuals and simulated envelopes");
    std::string g_data, g_response, g_covs, g_kind = "rq", g_csv, g_json;
    bool g_no_intercept = false, g_fixed_params = false;
    int g_envelope = 100;
    double g_level = 0.95;
    std::uint64_t g_seed = 1;
    diag->add_option("--data", g_data)->required();
    diag->add_option("--response", g_response)->required();
    diag->add_option("--covariates", g_covs);
    diag->add_flag("--no-intercept", g_no_intercept);
    diag->add_option("--residuals", g_kind, "rq|gcs");
    diag->add_option("--envelope", g_envelope, "number of replicates");
    diag->add_option("--level", g_level);
    diag->add_option("--seed", g_seed);
    diag->add_option("--csv", g_csv, "long-format envelope CSV output");
    diag->add_option("--json", g_json);
    diag->add_flag("--fixed-params", g_fixed_params,
                   "simulate envelopes without refitting each replicate");

    // mc
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo bias/MSE study");
    std::string m_config, m_out;
    mc_cmd->add_option("--config", m_config)->required();
    mc_cmd->add_option("--out", m_out, "output prefix")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dist) {
            bsd::Params p{d_alpha, d_beta};
            double value = 0.0;
            if (dist_what == "pmf") {
                if (!d_have_s) throw std::runtime_error("pmf needs --s");
                value = bsd::pmf(static_cast<std::int64_t>(d_s), p);
            } else if (dist_what == "cdf") {
                if (!d_have_s) throw std::runtime_error("cdf needs --s");
                value = bsd::cdf(d_s, p);
            } else if (dist_what == "quantile") {
                if (!d_have_p) throw std::runtime_error("quantile needs --p");
                value = static_cast<double>(bsd::quantile(d_p, p));
            } else if (dist_what == "mean") {
                value = bsd::raw_moment(d_r, p).value;
            } else if (dist_what == "var") {
                value = bsd::variance(p).value;
            } else if (dist_what == "mode") {
                value = static_cast<double>(bsd::mode(p));
            } else if (dist_what == "hazard") {
                if (!d_have_s) throw std::runtime_error("hazard needs --s");
                value = bsd::hazard(static_cast<std::int64_t>(d_s), p);
            } else {
                std::cerr << "unknown dist query '" << dist_what << "'\n";
                return kExitInput;
            }
            std::cout.precision(12);
            std::cout << value << '\n';
        } else if (*smp) {
            auto draws = bsd::sample(s_n, bsd::Params{s_alpha, s_beta}, s_seed);
            for (auto v : draws) std::cout << v << '\n';
        } else if (*fit_cmd) {
            bsd::io::IngestOptions opts;
            opts.response = f_response;
            auto table = bsd::io::read_table(f_data, true, ',');
            bsd::Dataset data = bsd::io::make_dataset(table, opts);
            bsd::FitResult fr = bsd::fit(data);

            std::cout.precision(8);
            std::cout << "n          " << data.size() << '\n'
                      << "alpha      " << fr.params.alpha;
            if (fr.std_errors) std::cout << "  (SE " << (*fr.std_errors)(0) << ")";
            std::cout << '\n' << "beta       " << fr.params.beta;
            if (fr.std_errors) std::cout << "  (SE " << (*fr.std_errors)(1) << ")";
            std::cout << '\n'
                      << "loglik     " << fr.loglik << '\n'
                      << "AIC        " << fr.aic << '\n'
                      << "BIC        " << fr.bic << '\n'
                      << "converged  " << (fr.converged ? "yes" : "no") << '\n';
            if (!f_json.empty()) {
                json report = base_report(command, f_seed);
                report["results"] = {{"kind", "fit"}, {"n", data.size()}, {"fit", fit_payload(fr)}};
                if (!fr.std_errors)
                    report["warnings"].push_back("observed information singular; no standard errors");
                write_json(f_json, report);
            }
            if (!fr.converged) return kExitNonConvergence;
        } else if (*reg_cmd) {
            bsd::io::IngestOptions opts;
            opts.response = r_response;
            if (!r_covs.empty()) opts.covariates = split_list(r_covs);
            opts.intercept = !r_no_intercept;
            auto table = bsd::io::read_table(r_data, true, ',');
            bsd::RegressionDataset data = bsd::io::make_regression_dataset(table, opts);
            bsd::RegressionFit fr = bsd::reg_fit(data);

            std::cout.precision(8);
            std::cout << "n          " << data.size() << '\n'
                      << "alpha      " << fr.params.alpha;
            if (fr.std_errors) std::cout << "  (SE " << (*fr.std_errors)(0) << ")";
            std::cout << '\n';
            for (Eigen::Index j = 0; j < fr.params.eta.size(); ++j) {
                std::cout << "eta" << j << "       " << fr.params.eta(j);
                if (fr.std_errors) std::cout << "  (SE " << (*fr.std_errors)(j + 1) << ")";
                std::cout << '\n';
            }
            std::cout << "loglik     " << fr.loglik << '\n'
                      << "AIC        " << fr.aic << '\n'
                      << "BIC        " << fr.bic << '\n'
                      << "converged  " << (fr.converged ? "yes" : "no") << '\n';
            if (!r_json.empty()) {
                json report = base_report(command, 0);
                report["results"] = {{"kind", "regress"}, {"n", data.size()},
                                     {"fit", reg_fit_payload(fr)}};
                write_json(r_json, report);
            }
            if (!fr.converged) return kExitNonConvergence;
        } else if (*diag) {
            bsd::io::IngestOptions opts;
            opts.response = g_response;
            if (!g_covs.empty()) opts.covariates = split_list(g_covs);
            opts.intercept = !g_no_intercept;
            auto table = bsd::io::read_table(g_data, true, ',');
            bsd::RegressionDataset data = bsd::io::make_regression_dataset(table, opts);
            bsd::RegressionFit fr = bsd::reg_fit(data);
            if (!fr.converged) {
                std::cerr << "fit did not converge; no diagnostics produced\n";
                return kExitNonConvergence;
            }
            bsd::ResidualKind kind = (g_kind == "gcs")
                                         ? bsd::ResidualKind::generalized_cox_snell
                                         : bsd::ResidualKind::randomized_quantile;
            bsd::DiagnosticsReport rep = bsd::envelope(fr, data, g_envelope, g_level, g_seed,
                                                       kind, !g_fixed_params);

            std::cout.precision(8);
            std::cout << "residuals  " << g_kind << "  n=" << rep.residuals.size()
                      << "  replicates=" << rep.replications
                      << " (dropped " << rep.dropped_replicates << ")\n";
            std::size_t inside = 0;
            for (std::size_t i = 0; i < rep.residuals.size(); ++i)
                if (rep.residuals[i] >= rep.envelope_lower[i] &&
                    rep.residuals[i] <= rep.envelope_upper[i])
                    ++inside;
            std::cout << "inside " << g_level * 100 << "% bands: " << inside << "/"
                      << rep.residuals.size() << '\n';

            if (!g_csv.empty()) {
                std::ofstream out(g_csv);
                if (!out) throw std::runtime_error("cannot write '" + g_csv + "'");
                out << "position,observed,lower,median,upper\n";
                out.precision(10);
                for (std::size_t i = 0; i < rep.residuals.size(); ++i)
                    out << i + 1 << ',' << rep.residuals[i] << ',' << rep.envelope_lower[i]
                        << ',' << rep.envelope_median[i] << ',' << rep.envelope_upper[i] << '\n';
            }
            if (!g_json.empty()) {
                json report = base_report(command, g_seed);
                report["results"] = {{"kind", "diagnose"},
                                     {"residual_kind", g_kind},
                                     {"level", rep.level},
                                     {"replications", rep.replications},
                                     {"dropped_replicates", rep.dropped_replicates},
                                     {"fit", reg_fit_payload(fr)},
                                     {"observed", rep.residuals},
                                     {"lower", rep.envelope_lower},
                                     {"median", rep.envelope_median},
                                     {"upper", rep.envelope_upper}};
                write_json(g_json, report);
            }
        } else if (*mc_cmd) {
            std::ifstream in(m_config);
            if (!in) throw std::runtime_error("cannot open '" + m_config + "'");
            json jcfg = json::parse(in);
            bsd::mc::StudyConfig cfg = parse_study_config(jcfg);
            bsd::mc::StudyResult result = bsd::mc::run_study(cfg);

            std::string csv = bsd::mc::to_csv(result);
            std::ofstream csv_out(m_out + ".csv");
            if (!csv_out) throw std::runtime_error("cannot write '" + m_out + ".csv'");
            csv_out << csv;

            json report = base_report(command, cfg.master_seed);
            report["results"] = {{"kind", "mc"}, {"config", jcfg}, {"cells", study_payload(result)}};
            write_json(m_out + ".json", report);
            std::cout << csv;
        }
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << '\n';
        if (msg.find("cannot") == 0 || msg.find("line") == 0 || msg.find("column") == 0 ||
            msg.find("config") == 0 || msg.find("response") != std::string::npos ||
            msg.find("contains no data") != std::string::npos || msg.find("needs") != std::string::npos)
            return kExitInput;
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
