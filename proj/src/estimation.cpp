#include "covshift/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace covshift {

namespace {

void require_sorted_support(std::span<const Point> support) {
    if (support.empty()) throw std::invalid_argument("estimate: empty support");
    for (std::size_t i = 1; i < support.size(); ++i) {
        if (support[i] <= support[i - 1]) throw std::invalid_argument("estimate: support must be strictly increasing");
    }
}

std::uint64_t checked_ceil(double value, const char* what) {
    if (!std::isfinite(value) || value >= 9.2e18) throw std::overflow_error(std::string(what) + ": budget overflows");
    return static_cast<std::uint64_t>(std::ceil(value));
}

HeavyLightSplit split(std::span<const Point> support, std::span<const double> mass, const BudgetPlan& plan) {
    if (support.size() > plan.n)
        throw std::invalid_argument("heavy_points: support has " + std::to_string(support.size()) +
                                    " points but plan.n = " + std::to_string(plan.n));
    HeavyLightSplit out;
    for (std::size_t i = 0; i < support.size(); ++i) {
        (mass[i] >= plan.heavy_cutoff ? out.heavy : out.light).push_back(support[i]);
    }
    return out;
}

}  // namespace

EmpiricalEstimate EmpiricalEstimate::from_pmf(const DiscretePmf& p, std::span<const Point> support) {
    require_sorted_support(support);
    EmpiricalEstimate est;
    est.support.assign(support.begin(), support.end());
    est.counts.assign(support.size(), 0);
    est.phat.reserve(support.size());
    for (Point x : support) est.phat.push_back(p(x));
    est.injected = true;
    return est;
}

double EmpiricalEstimate::at(Point x) const noexcept {
    auto it = std::lower_bound(support.begin(), support.end(), x);
    if (it == support.end() || *it != x) return 0.0;
    return phat[static_cast<std::size_t>(it - support.begin())];
}

EmpiricalEstimate estimate_pmf(SampleOracle& oracle, std::uint64_t m, std::span<const Point> support,
                               EstimationMode mode) {
    if (m < 1) throw std::invalid_argument("estimate_pmf: m must be >= 1");
    require_sorted_support(support);

    EmpiricalEstimate est;
    est.support.assign(support.begin(), support.end());
    est.m = m;
    if (mode == EstimationMode::Multinomial) {
        auto drawn = oracle.draw_counts(support, m);
        est.counts = std::move(drawn.counts);
        est.outside = drawn.outside;
    } else {
        est.counts.assign(support.size(), 0);
        for (std::uint64_t k = 0; k < m; ++k) {
            const Point x = oracle.draw_unlabeled();
            auto it = std::lower_bound(support.begin(), support.end(), x);
            if (it != support.end() && *it == x)
                ++est.counts[static_cast<std::size_t>(it - support.begin())];
            else
                ++est.outside;
        }
    }
    est.phat.reserve(support.size());
    for (auto c : est.counts) est.phat.push_back(static_cast<double>(c) / static_cast<double>(m));
    return est;
}

std::uint64_t chernoff_sample_size(std::uint64_t n, double w, double eps, double delta) {
    if (n < 1) throw std::invalid_argument("chernoff_sample_size: n must be >= 1");
    if (!(w >= 1.0) || !std::isfinite(w)) throw std::invalid_argument("chernoff_sample_size: w must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("chernoff_sample_size: eps must be in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("chernoff_sample_size: delta must be in (0,1)");
    const double nd = static_cast<double>(n);
    const double logs = std::log(4.0 * nd) + std::log(1.0 / delta);
    return checked_ceil(logs * 2048.0 * nd * w * w / (eps * eps * eps), "chernoff_sample_size");
}

double heavy_cutoff(std::uint64_t n, double w, double eps) { return eps / (2.0 * static_cast<double>(n) * w); }

std::uint64_t chebyshev_support_size(double s, double eps, bool allow_large_eps) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("chebyshev_support_size: s must be > 0");
    if (!(eps > 0.0)) throw std::invalid_argument("chebyshev_support_size: eps must be > 0");
    if (eps >= 1.0 && !allow_large_eps) throw std::invalid_argument("chebyshev_support_size: eps must be < 1");
    return checked_ceil(2.0 * s * std::sqrt(2.0 / eps), "chebyshev_support_size");
}

BudgetPlan BudgetPlan::make(std::uint64_t n, double w, double eps, double delta) {
    BudgetPlan plan;
    plan.n = n;
    plan.w = w;
    plan.eps = eps;
    plan.delta = delta;
    plan.m1 = chernoff_sample_size(n, w, eps, delta);
    plan.heavy_cutoff = covshift::heavy_cutoff(n, w, eps);
    return plan;
}

HeavyLightSplit heavy_points(const DiscretePmf& p, const BudgetPlan& plan) {
    return split(p.support(), p.mass(), plan);
}

HeavyLightSplit heavy_points(const EmpiricalEstimate& est, const BudgetPlan& plan) {
    return split(est.support, est.phat, plan);
}

}  // namespace covshift
