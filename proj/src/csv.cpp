#include "bsd/csv.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bsd::io {

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delimiter)) {
        // trim surrounding whitespace
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == delimiter) out.emplace_back("");
    return out;
}

std::size_t resolve_column(const InputTable& table, const std::string& ref) {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        if (table.columns[i] == ref) return i;
    // fall back to a numeric index
    std::size_t idx = 0;
    auto [p, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), idx);
    if (ec == std::errc{} && p == ref.data() + ref.size() && idx < table.columns.size())
        return idx;
    throw std::runtime_error("column '" + ref + "' not found");
}

std::int64_t as_count(double v, std::size_t row) {
    if (v < 0.0 || std::abs(v - std::round(v)) > 1e-9)
        throw std::runtime_error("response value " + std::to_string(v) + " at row " +
                                 std::to_string(row + 1) + " is not a nonnegative integer");
    return static_cast<std::int64_t>(std::llround(v));
}

}  // namespace

InputTable read_table(const std::string& path, bool header, char delimiter) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    InputTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split(line, delimiter);
        if (table.columns.empty()) {
            if (header) {
                table.columns = fields;
                continue;
            }
            for (std::size_t i = 0; i < fields.size(); ++i)
                table.columns.push_back("c" + std::to_string(i));
        }
        if (fields.size() != table.columns.size())
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(table.columns.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        std::vector<double> row;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            try {
                std::size_t used = 0;
                double v = std::stod(fields[i], &used);
                if (used != fields[i].size()) throw std::invalid_argument("trailing text");
                row.push_back(v);
            } catch (const std::exception&) {
                throw std::runtime_error("line " + std::to_string(lineno) + ", column '" +
                                         table.columns[i] + "': cannot parse '" + fields[i] +
                                         "' as a number");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw std::runtime_error("'" + path + "' contains no data rows");
    return table;
}

Dataset make_dataset(const InputTable& table, const IngestOptions& opts) {
    std::size_t rcol = opts.response.empty() ? 0 : resolve_column(table, opts.response);
    Dataset data;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        data.observations.push_back(as_count(table.rows[i][rcol], i));
    data.validate();
    return data;
}

RegressionDataset make_regression_dataset(const InputTable& table, const IngestOptions& opts) {
    std::size_t rcol = opts.response.empty() ? 0 : resolve_column(table, opts.response);
    std::vector<std::size_t> cov_cols;
    if (opts.covariates.empty()) {
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            if (i != rcol) cov_cols.push_back(i);
    } else {
        for (const auto& c : opts.covariates) cov_cols.push_back(resolve_column(table, c));
    }

    const auto n = static_cast<Eigen::Index>(table.rows.size());
    const auto p = static_cast<Eigen::Index>(cov_cols.size());
    RegressionDataset data;
    data.design.resize(n, p + (opts.intercept ? 1 : 0));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        data.responses.push_back(as_count(row[rcol], static_cast<std::size_t>(i)));
        Eigen::Index j = 0;
        if (opts.intercept) data.design(i, j++) = 1.0;
        for (auto c : cov_cols) data.design(i, j++) = row[c];
    }
    data.validate();
    return data;
}

}  // namespace bsd::io
