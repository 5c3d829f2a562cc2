#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "covshift/config.hpp"

namespace covshift {

inline constexpr int kSchemaVersion = 1;

using Cell = std::variant<std::int64_t, std::uint64_t, double, bool, std::string>;

/// One emitted row. Values line up with RunResult::columns; `pass` is
/// recomputable from the recorded values alone.
struct TrialReport {
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    std::vector<Cell> values;
    bool pass = false;
    double wall_seconds = 0.0;  // kept out of the emitted rows
};

struct Summary {
    std::string kind;
    std::uint64_t rows = 0;
    std::uint64_t successes = 0;
    double success_fraction = 0.0;
    double nominal = 0.0;    // rate the guarantee promises (1 - delta, or 1)
    double sigma = 0.0;      // binomial sigma at the nominal rate
    double threshold = 0.0;  // nominal - 3 sigma
    bool passed = false;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::pair<std::string, std::string>> notes;
    double wall_seconds = 0.0;
};

struct RunResult {
    ExperimentConfig config;
    std::vector<std::string> columns;
    std::vector<TrialReport> rows;
    Summary summary;
};

/// Runs the experiment described by `config` (validated first). Trial i
/// draws from derive_seed(master_seed, i); rows come back sorted by trial.
RunResult run(const ExperimentConfig& config);

/// nominal - 3 sqrt(nominal (1 - nominal) / trials).
double binomial_threshold(double nominal, std::uint64_t trials);

std::string to_csv(const RunResult& result);
/// Rows and summary as one JSON document (summary minus wall time).
std::string to_json(const RunResult& result);
std::string summary_json(const RunResult& result);

}  // namespace covshift
