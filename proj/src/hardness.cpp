#include "covshift/hardness.hpp"

#include <cmath>
#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "covshift/oracles.hpp"
#include "covshift/parallel.hpp"

namespace covshift {

namespace {

struct TrialStats {
    double mean = 0.0;
    double std_err = 0.0;
};

TrialStats summarize(const std::vector<double>& values) {
    TrialStats stats;
    if (values.empty()) return stats;
    const double count = static_cast<double>(values.size());
    stats.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
        stats.std_err = std::sqrt(ss / (count - 1.0) / count);
    }
    return stats;
}

std::vector<Point> support_points(int n) {
    std::vector<Point> support(static_cast<std::size_t>(n));
    std::iota(support.begin(), support.end(), Point{1});
    return support;
}

// Error of one trained learner on the uniform target.
template <class Learner>
std::vector<double> run_trials(const LeftRightInstance& inst, std::uint64_t k, std::uint64_t trials,
                               std::uint64_t seed, unsigned workers, Learner&& learn) {
    std::vector<double> errors(trials);
    const auto base = derive_seed(seed, k);
    parallel_for(trials, workers, [&](std::size_t t) {
        const auto trial_seed = derive_seed(base, t);
        auto oracle = SampleOracle::labeled(inst.source, inst.truth, derive_seed(trial_seed, 0));
        Rng coin_rng = make_rng(derive_seed(trial_seed, 1));
        std::vector<LabeledPoint> samples;
        samples.reserve(k);
        for (std::uint64_t i = 0; i < k; ++i) samples.push_back(oracle.draw_labeled());
        errors[t] = exact_error(learn(samples, coin_rng), inst.truth, inst.source);
    });
    return errors;
}

}  // namespace

LeftRightInstance make_left_right(int n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("make_left_right: n must be even and >= 2");
    const int half = n / 2;
    return LeftRightInstance{
        .n = n,
        .left = DiscretePmf::uniform(1, half),
        .right = DiscretePmf::uniform(half + 1, n),
        .source = DiscretePmf::uniform(1, n),
        .truth = Hypothesis::interval(half + 1, n),
    };
}

Hypothesis memorization_learner(std::span<const LabeledPoint> samples, std::span<const Point> support, Rng& rng) {
    // -1 unseen, otherwise the last observed label.
    std::vector<signed char> seen(support.size(), -1);
    for (const auto& s : samples) {
        auto it = std::lower_bound(support.begin(), support.end(), s.point);
        if (it != support.end() && *it == s.point) seen[static_cast<std::size_t>(it - support.begin())] = s.label;
    }
    std::vector<std::pair<Point, bool>> entries;
    entries.reserve(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
        // The coin is drawn for every point so the stream layout does not
        // depend on which points were seen.
        const bool coin = (rng() >> 63) != 0;
        entries.emplace_back(support[i], seen[i] < 0 ? coin : seen[i] == 1);
    }
    return Hypothesis::table(std::move(entries));
}

double memorization_error_analytic(int n, std::uint64_t k) {
    const double miss = std::pow((n - 1.0) / n, static_cast<double>(k));
    return 0.5 * miss;
}

std::vector<HardnessRow> hardness_curve(int n, std::span<const std::uint64_t> ks, std::uint64_t trials,
                                        std::uint64_t seed, unsigned workers) {
    if (trials < 1) throw std::invalid_argument("hardness_curve: trials must be >= 1");
    const auto inst = make_left_right(n);
    const auto support = support_points(n);

    std::vector<HardnessRow> rows;
    rows.reserve(ks.size());
    for (std::uint64_t k : ks) {
        const auto errors = run_trials(inst, k, trials, seed, workers, [&](const auto& samples, Rng& coin) {
            return memorization_learner(samples, support, coin);
        });
        const auto stats = summarize(errors);
        const double miss = std::pow((n - 1.0) / n, static_cast<double>(k));
        rows.push_back({
            .n = n,
            .k = k,
            .trials = trials,
            .mean_error = stats.mean,
            .analytic_error = memorization_error_analytic(n, k),
            .pessimistic_error = 0.5 * miss + (1.0 - miss),
            .std_err = stats.std_err,
        });
    }
    return rows;
}

HardnessRow erm_tables_error(int n, std::uint64_t k, std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("erm_tables_error: trials must be >= 1");
    const auto inst = make_left_right(n);
    const auto support = support_points(n);
    const auto tables = HypothesisClass::all_tables(support);
    const auto errors = run_trials(inst, k, trials, seed, 1, [&](const auto& samples, Rng&) {
        return erm_learn(samples, tables);
    });
    const auto stats = summarize(errors);
    const double miss = std::pow((n - 1.0) / n, static_cast<double>(k));
    return {n, k, trials, stats.mean, memorization_error_analytic(n, k), 0.5 * miss + (1.0 - miss), stats.std_err};
}

double analytic_crossing_real(int n, double threshold) {
    if (n < 2) throw std::invalid_argument("analytic_crossing: n must be >= 2");
    if (!(threshold > 0.0 && threshold < 0.5)) throw std::invalid_argument("analytic_crossing: threshold in (0, 0.5)");
    return std::log(1.0 / (2.0 * threshold)) / std::log(static_cast<double>(n) / (n - 1.0));
}

std::uint64_t analytic_crossing(int n, double threshold) {
    auto k = static_cast<std::uint64_t>(std::floor(analytic_crossing_real(n, threshold)));
    while (memorization_error_analytic(n, k) > threshold) ++k;
    return k;
}

std::optional<std::uint64_t> empirical_crossing(int n, double threshold, std::uint64_t trials, std::uint64_t seed,
                                                std::uint64_t k_max, unsigned workers) {
    for (std::uint64_t k = 0; k <= k_max; ++k) {
        const std::uint64_t one[] = {k};
        if (hardness_curve(n, one, trials, seed, workers).front().mean_error <= threshold) return k;
    }
    return std::nullopt;
}

}  // namespace covshift
