#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "covshift/distributions.hpp"
#include "covshift/estimation.hpp"
#include "covshift/hypotheses.hpp"
#include "covshift/oracles.hpp"
#include "covshift/rng.hpp"

namespace covshift {

/// Per-point acceptance probabilities for rejection sampling the source
/// towards the target, plus the Step 2 draw budget.
///
/// acceptance(i) = r(i) / max_j r(j) with r(i) = phat_target(i) / phat_source(i);
/// points with a zero source or target estimate get acceptance 0, and the
/// maximal-ratio point gets exactly 1.
struct RejectionPlan {
    std::vector<Point> support;
    std::vector<double> acceptance;
    EmpiricalEstimate source_estimate;
    EmpiricalEstimate target_estimate;
    std::uint64_t m2_prime = 0;
    std::uint64_t m2_budget = 0;
    double max_ratio = 0.0;

    [[nodiscard]] double acceptance_at(Point x) const noexcept;
};

/// ceil(m2_prime * w^2 * ln(4/delta)).
std::uint64_t rejection_budget(std::uint64_t m2_prime, double w, double delta);

/// Throws std::invalid_argument when the estimates disagree on support, when
/// m2_prime == 0, or when no point has a positive ratio.
RejectionPlan build_plan(const EmpiricalEstimate& source_est, const EmpiricalEstimate& target_est,
                         std::uint64_t m2_prime, double w, double delta);

enum class ThinningMode {
    Streaming,  // draw, then accept with probability acceptance(x)
    Binomial,   // multinomial source counts, binomially thinned per point
};

struct RejectionSample {
    std::vector<LabeledPoint> dataset;
    std::uint64_t drawn = 0;
    std::uint64_t accepted = 0;
    double acceptance_rate = 0.0;
    bool shortfall = false;  // accepted < m2_prime
};

RejectionSample rejection_sample(SampleOracle& labeled_source, const RejectionPlan& plan, Rng& rng,
                                 ThinningMode mode = ThinningMode::Streaming);

/// Distribution of accepted source draws:
/// D_f(i) = source(i) acceptance(i) / sum_j source(j) acceptance(j).
/// Computed in exact rational arithmetic and rounded once per point.
/// Throws std::invalid_argument when the normalizer is 0.
DiscretePmf analytic_df(const DiscretePmf& true_source, const RejectionPlan& plan);

/// sum_i |target(i) - phat_target(i) source(i) / phat_source(i)|: the
/// per-point deviation without normalizing D_f.
double unnormalized_deviation(const DiscretePmf& true_source, const DiscretePmf& true_target,
                              const RejectionPlan& plan);

struct PipelineOptions {
    EstimationMode estimation = EstimationMode::Multinomial;
    ThinningMode thinning = ThinningMode::Streaming;
    std::optional<double> w_override;  // defaults to 1 / W(source, target)
    std::optional<double> s_bound;     // enables Chebyshev truncation
    bool inject_exact = false;         // replace Step 1 estimates with the true pmfs
};

struct DaRunReport {
    Hypothesis hypothesis;
    DiscretePmf df_analytic;

    // budgets
    std::uint64_t n = 0;
    double w = 1.0;
    double eps = 0.0;
    double delta = 0.0;
    std::uint64_t m1 = 0;
    double heavy_cutoff = 0.0;
    std::uint64_t m2_prime = 0;
    std::uint64_t m2_budget = 0;

    // Step 2
    std::uint64_t drawn_count = 0;
    std::uint64_t accepted_count = 0;
    double empirical_acceptance_rate = 0.0;
    double acceptance_floor = 0.0;  // 1 / w^2
    bool acceptance_floor_ok = false;
    bool shortfall = false;

    // distances and errors, all exact against the true pmfs
    double d_df_target = 0.0;
    double unnormalized_deviation = 0.0;
    double df_error = 0.0;
    double target_error = 0.0;
    bool estimation_passed = false;
    bool claim1_premise = false;  // d <= eps/4 and df_error <= eps/2
    bool claim1_holds = false;    // premise implies target_error <= eps

    // truncation accounting
    bool truncated = false;
    double dropped_source = 0.0;
    double dropped_target = 0.0;

    [[nodiscard]] bool success() const noexcept { return target_error <= eps; }
};

/// Estimate, rejection-sample, train. Step 1 is sized for d(D_f, D_T) <= eps/4
/// at confidence delta/2, and Step 2 for an eps/2, delta/2 PAC guarantee.
/// Throws WeightRatioViolation when the target leaves the source support.
DaRunReport run_da_pipeline(const DiscretePmf& source, const DiscretePmf& target, const Hypothesis& truth,
                            const HypothesisClass& hclass, double eps, double delta, Rng& rng,
                            const PipelineOptions& options = {});

/// rate >= floor - 3 sigma, sigma = sqrt(rate (1 - rate) / drawn) taken at the
/// observed rate (a floor of exactly 1 at w = 1 would otherwise leave no slack).
bool acceptance_rate_above_floor(double rate, std::uint64_t drawn, double floor);

}  // namespace covshift
