#include "covshift/rejection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "exact.hpp"

namespace covshift {

double RejectionPlan::acceptance_at(Point x) const noexcept {
    auto it = std::lower_bound(support.begin(), support.end(), x);
    if (it == support.end() || *it != x) return 0.0;
    return acceptance[static_cast<std::size_t>(it - support.begin())];
}

std::uint64_t rejection_budget(std::uint64_t m2_prime, double w, double delta) {
    if (m2_prime < 1) throw std::invalid_argument("rejection_budget: m2_prime must be >= 1");
    if (!(w >= 1.0)) throw std::invalid_argument("rejection_budget: w must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("rejection_budget: delta must be in (0,1)");
    return static_cast<std::uint64_t>(std::ceil(static_cast<double>(m2_prime) * w * w * std::log(4.0 / delta)));
}

RejectionPlan build_plan(const EmpiricalEstimate& source_est, const EmpiricalEstimate& target_est,
                         std::uint64_t m2_prime, double w, double delta) {
    if (source_est.support != target_est.support)
        throw std::invalid_argument("build_plan: estimates must share a support");

    RejectionPlan plan;
    plan.support = source_est.support;
    plan.source_estimate = source_est;
    plan.target_estimate = target_est;
    plan.m2_prime = m2_prime;
    plan.m2_budget = rejection_budget(m2_prime, w, delta);

    std::vector<double> ratio(plan.support.size(), 0.0);
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        const double ps = source_est.phat[i];
        const double pt = target_est.phat[i];
        if (ps > 0.0 && pt > 0.0) ratio[i] = pt / ps;
    }
    plan.max_ratio = *std::max_element(ratio.begin(), ratio.end());
    if (!(plan.max_ratio > 0.0))
        throw std::invalid_argument("build_plan: no point has positive source and target estimates");

    plan.acceptance.resize(ratio.size());
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        plan.acceptance[i] = ratio[i] == plan.max_ratio ? 1.0 : std::min(1.0, ratio[i] / plan.max_ratio);
    }
    return plan;
}

RejectionSample rejection_sample(SampleOracle& labeled_source, const RejectionPlan& plan, Rng& rng,
                                 ThinningMode mode) {
    RejectionSample out;
    out.drawn = plan.m2_budget;
    if (mode == ThinningMode::Streaming) {
        for (std::uint64_t k = 0; k < plan.m2_budget; ++k) {
            const auto example = labeled_source.draw_labeled();
            if (uniform01(rng) < plan.acceptance_at(example.point)) out.dataset.push_back(example);
        }
    } else {
        for (const auto& [example, count] : labeled_source.draw_labeled_counts(plan.m2_budget)) {
            const double a = plan.acceptance_at(example.point);
            std::uint64_t kept = 0;
            if (a >= 1.0) {
                kept = count;
            } else if (a > 0.0) {
                std::binomial_distribution<long long> thin(static_cast<long long>(count), a);
                kept = static_cast<std::uint64_t>(thin(rng));
            }
            out.dataset.insert(out.dataset.end(), kept, example);
        }
    }
    out.accepted = out.dataset.size();
    out.acceptance_rate = out.drawn ? static_cast<double>(out.accepted) / static_cast<double>(out.drawn) : 0.0;
    out.shortfall = out.accepted < plan.m2_prime;
    return out;
}

DiscretePmf analytic_df(const DiscretePmf& true_source, const RejectionPlan& plan) {
    // source(i) * acceptance(i) is proportional to source(i) * phat_t(i) / phat_s(i);
    // the common 1/max_ratio cancels in the normalization, so use the exact ratio.
    std::vector<detail::Rational> weight(plan.support.size());
    detail::Rational total(0);
    for (std::size_t i = 0; i < plan.support.size(); ++i) {
        const double ps = plan.source_estimate.phat[i];
        const double pt = plan.target_estimate.phat[i];
        const double s = true_source(plan.support[i]);
        if (!(ps > 0.0 && pt > 0.0 && s > 0.0)) continue;
        weight[i] = detail::to_rational(s) * detail::to_rational(pt) / detail::to_rational(ps);
        total += weight[i];
    }
    if (total == 0) throw std::invalid_argument("analytic_df: no source mass survives rejection");

    std::vector<double> mass(weight.size());
    for (std::size_t i = 0; i < weight.size(); ++i) mass[i] = detail::to_double(weight[i] / total);
    return {plan.support, std::move(mass)};
}

double unnormalized_deviation(const DiscretePmf& true_source, const DiscretePmf& true_target,
                              const RejectionPlan& plan) {
    double total = 0.0;
    for (Point x : union_support(true_source, true_target)) {
        const double p1 = true_source(x);
        const double p2 = true_target(x);
        const double ps = plan.source_estimate.at(x);
        const double pt = plan.target_estimate.at(x);
        const double reweighted = ps > 0.0 ? pt * p1 / ps : 0.0;
        total += std::abs(p2 - reweighted);
    }
    return total;
}

bool acceptance_rate_above_floor(double rate, std::uint64_t drawn, double floor) {
    if (drawn == 0) return false;
    const double sigma = std::sqrt(rate * (1.0 - rate) / static_cast<double>(drawn));
    return rate >= floor - 3.0 * sigma;
}

namespace {

struct StepOneOutcome {
    EmpiricalEstimate source;
    EmpiricalEstimate target;
};

// Heavy points (by true source mass) must be estimated within relative eps/16.
bool estimates_within_band(const DiscretePmf& source, const DiscretePmf& target, const EmpiricalEstimate& src_est,
                           const EmpiricalEstimate& tgt_est, const BudgetPlan& budget) {
    if (src_est.injected) return true;
    const double tol = budget.eps / 16.0;
    for (std::size_t i = 0; i < src_est.support.size(); ++i) {
        const Point x = src_est.support[i];
        const double p1 = source(x);
        if (p1 < budget.heavy_cutoff) continue;
        const double p2 = target(x);
        if (std::abs(src_est.phat[i] - p1) > p1 * tol) return false;
        if (std::abs(tgt_est.phat[i] - p2) > p2 * tol) return false;
    }
    return true;
}

}  // namespace

DaRunReport run_da_pipeline(const DiscretePmf& source, const DiscretePmf& target, const Hypothesis& truth,
                            const HypothesisClass& hclass, double eps, double delta, Rng& rng,
                            const PipelineOptions& options) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("run_da_pipeline: eps must be in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("run_da_pipeline: delta must be in (0,1)");

    const auto ratio = weight_ratio(source, target);
    if (ratio.violated()) throw WeightRatioViolation(ratio.witness_point);
    const double w = options.w_override.value_or(ratio.w());

    // Finite support the algorithm works on, optionally cut to Chebyshev windows.
    std::vector<Point> support = union_support(source, target);
    bool truncated = false;
    double dropped_source = 0.0;
    double dropped_target = 0.0;
    if (options.s_bound) {
        const std::uint64_t n_cheb = chebyshev_support_size(*options.s_bound, eps / 2.0);
        if (support.size() > n_cheb) {
            const auto [slo, shi] = chebyshev_window(source, *options.s_bound, eps / 2.0);
            const auto [tlo, thi] = chebyshev_window(target, *options.s_bound, eps / 2.0);
            const Point lo = std::min(slo, tlo);
            const Point hi = std::max(shi, thi);
            std::erase_if(support, [lo, hi](Point x) { return x < lo || x > hi; });
            if (support.empty()) throw std::invalid_argument("run_da_pipeline: truncation window is empty");
            dropped_source = truncate(source, lo, hi).dropped_mass;
            dropped_target = truncate(target, lo, hi).dropped_mass;
            truncated = true;
        }
    }

    const auto budget = BudgetPlan::make(support.size(), w, eps / 4.0, delta / 2.0);
    auto source_oracle = SampleOracle::labeled(source, truth, rng());
    auto target_oracle = SampleOracle::unlabeled(target, rng());
    Rng thinning_rng = make_rng(rng());

    // Step 1
    EmpiricalEstimate src_est;
    EmpiricalEstimate tgt_est;
    if (options.inject_exact) {
        src_est = EmpiricalEstimate::from_pmf(source, support);
        tgt_est = EmpiricalEstimate::from_pmf(target, support);
    } else {
        src_est = estimate_pmf(source_oracle, budget.m1, support, options.estimation);
        tgt_est = estimate_pmf(target_oracle, budget.m1, support, options.estimation);
    }

    // Step 2
    const std::uint64_t m2_prime = pac_sample_size(hclass.size(), eps / 2.0, delta / 2.0);
    const auto plan = build_plan(src_est, tgt_est, m2_prime, w, delta);
    const auto kept = rejection_sample(source_oracle, plan, thinning_rng, options.thinning);

    // Step 3
    DaRunReport report{.hypothesis = erm_learn(kept.dataset, hclass), .df_analytic = analytic_df(source, plan)};
    report.n = budget.n;
    report.w = w;
    report.eps = eps;
    report.delta = delta;
    report.m1 = options.inject_exact ? 0 : budget.m1;
    report.heavy_cutoff = budget.heavy_cutoff;
    report.m2_prime = m2_prime;
    report.m2_budget = plan.m2_budget;

    report.drawn_count = kept.drawn;
    report.accepted_count = kept.accepted;
    report.empirical_acceptance_rate = kept.acceptance_rate;
    report.acceptance_floor = 1.0 / (w * w);
    report.acceptance_floor_ok = acceptance_rate_above_floor(kept.acceptance_rate, kept.drawn, report.acceptance_floor);
    report.shortfall = kept.shortfall;

    report.d_df_target = l1_distance(report.df_analytic, target).l1;
    report.unnormalized_deviation = unnormalized_deviation(source, target, plan);
    report.df_error = exact_error(report.hypothesis, truth, report.df_analytic);
    report.target_error = exact_error(report.hypothesis, truth, target);
    report.estimation_passed = estimates_within_band(source, target, src_est, tgt_est, budget);
    report.claim1_premise = report.d_df_target <= eps / 4.0 && report.df_error <= eps / 2.0;
    report.claim1_holds = !report.claim1_premise || report.target_error <= eps;

    report.truncated = truncated;
    report.dropped_source = dropped_source;
    report.dropped_target = dropped_target;
    return report;
}

}  // namespace covshift
