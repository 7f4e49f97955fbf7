#ifndef BSD_CSV_HPP
#define BSD_CSV_HPP

#include <string>
#include <vector>

#include "bsd/fit.hpp"
#include "bsd/regression.hpp"

namespace bsd::io {

struct InputTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct IngestOptions {
    bool header = true;
    char delimiter = ',';
    std::string response;               // column name or 0-based index
    std::vector<std::string> covariates;
    bool intercept = true;
};

InputTable read_table(const std::string& path, bool header, char delimiter);

/// Response-only extraction; rejects non-integer or negative values with
/// the offending row number.
Dataset make_dataset(const InputTable& table, const IngestOptions& opts);

RegressionDataset make_regression_dataset(const InputTable& table, const IngestOptions& opts);

}  // namespace bsd::io

#endif
