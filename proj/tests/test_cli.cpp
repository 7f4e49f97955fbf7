#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bsd/csv.hpp"
#include "bsd/distribution.hpp"

namespace {

std::string cli_path() {
    const char* p = std::getenv("BSD_CLI");
    REQUIRE(p != nullptr);
    return p;
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string temp_file(const std::string& name, const std::string& content) {
    std::string path = "/tmp/bsd_cli_test_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string sample_csv(std::size_t n, std::uint64_t seed) {
    auto draws = bsd::sample(n, bsd::Params{0.8, 5.0}, seed);
    std::ostringstream os;
    os << "y\n";
    for (auto v : draws) os << v << '\n';
    return os.str();
}

}  // namespace

TEST_CASE("dist queries") {
    auto r = run("dist pmf --alpha 1 --beta 1 --s 0");
    CHECK(r.exit_code == 0);
    CHECK(std::stod(r.output) == doctest::Approx(0.5));
    CHECK(run("dist quantile --alpha 0.5 --beta 2 --p 0.9").output.find("3") == 0);
    CHECK(run("dist mean --alpha 0.5 --beta 2").exit_code == 0);
    // invalid parameters exit with the input-error code
    CHECK(run("dist pmf --alpha -1 --beta 1 --s 0").exit_code == 2);
    CHECK(run("dist pmf --alpha 1 --beta 1").exit_code == 2);  // missing --s
}

TEST_CASE("sample is seed-deterministic") {
    auto a = run("sample --alpha 0.5 --beta 2 --n 20 --seed 9");
    auto b = run("sample --alpha 0.5 --beta 2 --n 20 --seed 9");
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
}

TEST_CASE("csv ingestion rejects bad responses with row numbers") {
    auto table_path = temp_file("bad.csv", "y,x\n1,0.5\n3.5,0.2\n2,0.1\n");
    bsd::io::InputTable table = bsd::io::read_table(table_path, true, ',');
    bsd::io::IngestOptions opts;
    opts.response = "y";
    CHECK_THROWS_WITH_AS(bsd::io::make_dataset(table, opts),
                         doctest::Contains("row 2"), std::runtime_error);
    auto neg_path = temp_file("neg.csv", "y\n1\n-2\n");
    auto neg = bsd::io::read_table(neg_path, true, ',');
    CHECK_THROWS_AS(bsd::io::make_dataset(neg, {}), std::runtime_error);
    CHECK_THROWS_AS(bsd::io::read_table("/tmp/definitely_missing.csv", true, ','),
                    std::runtime_error);
    auto empty_path = temp_file("empty.csv", "");
    CHECK_THROWS_AS(bsd::io::read_table(empty_path, true, ','), std::runtime_error);
}

TEST_CASE("regression ingestion prepends an intercept") {
    auto path = temp_file("reg.csv", "y,x\n1,0.5\n3,0.2\n2,0.1\n4,0.9\n0,0.3\n2,0.6\n");
    auto table = bsd::io::read_table(path, true, ',');
    bsd::io::IngestOptions opts;
    opts.response = "y";
    opts.covariates = {"x"};
    auto data = bsd::io::make_regression_dataset(table, opts);
    CHECK(data.design.cols() == 2);
    CHECK(data.design(0, 0) == 1.0);
    CHECK(data.design(0, 1) == 0.5);
    CHECK(data.responses.size() == 6);
}

TEST_CASE("fit command emits a versioned JSON report") {
    auto path = temp_file("fit.csv", sample_csv(300, 4));
    auto json_path = std::string("/tmp/bsd_cli_test_fit.json");
    auto r = run("fit --data " + path + " --response y --json " + json_path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("alpha") != std::string::npos);

    std::ifstream in(json_path);
    REQUIRE(in.good());
    nlohmann::json report = nlohmann::json::parse(in);
    CHECK(report["schema_version"] == "1");
    CHECK(report.contains("command"));
    CHECK(report.contains("seed"));
    CHECK(report["results"]["fit"]["converged"] == true);
}

TEST_CASE("fit estimates are invariant to row order") {
    auto csv = sample_csv(200, 12);
    auto path = temp_file("order_a.csv", csv);
    // reverse the data rows
    std::istringstream ss(csv);
    std::string line, header;
    std::getline(ss, header);
    std::vector<std::string> rows;
    while (std::getline(ss, line)) rows.push_back(line);
    std::ostringstream rev;
    rev << header << '\n';
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) rev << *it << '\n';
    auto path_b = temp_file("order_b.csv", rev.str());

    auto ja = std::string("/tmp/bsd_cli_test_oa.json");
    auto jb = std::string("/tmp/bsd_cli_test_ob.json");
    REQUIRE(run("fit --data " + path + " --json " + ja).exit_code == 0);
    REQUIRE(run("fit --data " + path_b + " --json " + jb).exit_code == 0);
    std::ifstream fa(ja), fb(jb);
    nlohmann::json a = nlohmann::json::parse(fa), b = nlohmann::json::parse(fb);
    CHECK(std::abs(a["results"]["fit"]["alpha"].get<double>() -
                   b["results"]["fit"]["alpha"].get<double>()) < 1e-10);
    CHECK(std::abs(a["results"]["fit"]["beta"].get<double>() -
                   b["results"]["fit"]["beta"].get<double>()) < 1e-10);
}

TEST_CASE("mc command round-trips its config") {
    nlohmann::json cfg = {{"model", "dist"},       {"sample_sizes", {20}}, {"alphas", {0.5}},
                          {"beta", 2.0},           {"replications", 10},   {"master_seed", 77}};
    auto cfg_path = temp_file("mc.json", cfg.dump());
    auto r = run("mc --config " + cfg_path + " --out /tmp/bsd_cli_test_mc");
    CHECK(r.exit_code == 0);
    std::ifstream csv("/tmp/bsd_cli_test_mc.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header.find("n,alpha,parameter,bias,mse") == 0);
    std::ifstream js("/tmp/bsd_cli_test_mc.json");
    nlohmann::json report = nlohmann::json::parse(js);
    CHECK(report["schema_version"] == "1");
    CHECK(report["results"]["cells"].size() == 1);
    CHECK(run("mc --config /tmp/missing_cfg.json --out /tmp/x").exit_code == 2);
}

TEST_CASE("diagnose emits long-format envelope CSV") {
    // small simulated regression dataset
    bsd::Rng rng(55);
    std::ostringstream os;
    os << "y,x\n";
    for (int i = 0; i < 60; ++i) {
        double x = rng.uniform();
        double beta = std::exp(0.5 + 1.0 * x);
        auto draw = bsd::sample(1, bsd::Params{0.5, beta}, rng.next_u64());
        os << draw[0] << ',' << x << '\n';
    }
    auto path = temp_file("diag.csv", os.str());
    auto r = run("diagnose --data " + path +
                 " --response y --covariates x --residuals rq --envelope 30 --level 0.95"
                 " --seed 3 --csv /tmp/bsd_cli_test_env.csv");
    CHECK(r.exit_code == 0);
    std::ifstream env("/tmp/bsd_cli_test_env.csv");
    REQUIRE(env.good());
    std::string header;
    std::getline(env, header);
    CHECK(header == "position,observed,lower,median,upper");
    int lines = 0;
    std::string line;
    while (std::getline(env, line)) ++lines;
    CHECK(lines == 60);
}
