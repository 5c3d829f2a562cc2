#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "covshift/distributions.hpp"
#include "covshift/estimation.hpp"
#include "covshift/hypotheses.hpp"
#include "covshift/rejection.hpp"

namespace covshift {

enum class ExperimentKind { DistMetrics, BoundsCheck, Lemma1, Theorem2, Hardness, Compare, Complexity };
enum class OutputFormat { Csv, Json };

std::string_view to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_kind(std::string_view text) noexcept;

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message);
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Declarative experiment description. Distribution, truth and class
/// fields hold literal specs (see parse_pmf / parse_hypothesis / parse_class).
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::DistMetrics;
    std::string source;
    std::string target;
    std::string truth;
    std::string hclass;
    double eps = 0.1;
    double delta = 0.1;
    std::optional<double> w_expected;
    std::optional<double> s_bound;
    std::uint64_t trials = 1;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;
    std::string output;  // empty: stdout
    OutputFormat format = OutputFormat::Csv;

    // kind-specific
    int n = 8;                       // bounds-check support size, hardness instance size
    std::vector<std::uint64_t> ks;   // hardness draw counts
    double tolerance = 0.01;         // hardness |mean - analytic| per row
    bool inject_exact = false;       // lemma1 / theorem2 / compare
    EstimationMode estimation = EstimationMode::Multinomial;
    ThinningMode thinning = ThinningMode::Streaming;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// `key = value` lines; `#` starts a comment. Throws ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);
/// Kind-specific required fields and ranges. Throws ConfigError.
void validate(const ExperimentConfig& config);

/// uniform(lo,hi) | binomial(n,p) | geometric_truncated(p,n) | point(x) |
/// custom((x,m),...) | (x,m),...  Throws std::invalid_argument.
DiscretePmf parse_pmf(std::string_view spec);
/// interval(a,b) | empty | const(0|1) | table((x,label),...)
Hypothesis parse_hypothesis(std::string_view spec);
/// intervals(n) | all_tables(n) | tables(h1;h2;...)
HypothesisClass parse_class(std::string_view spec);

}  // namespace covshift
