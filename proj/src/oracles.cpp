#include "covshift/oracles.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace covshift {

SampleOracle::SampleOracle(DiscretePmf pmf, std::optional<Hypothesis> truth, std::uint64_t seed)
    : pmf_(std::move(pmf)), truth_(std::move(truth)), rng_(make_rng(seed)) {}

SampleOracle SampleOracle::labeled(DiscretePmf pmf, Hypothesis truth, std::uint64_t seed) {
    return {std::move(pmf), std::move(truth), seed};
}

SampleOracle SampleOracle::unlabeled(DiscretePmf pmf, std::uint64_t seed) {
    return {std::move(pmf), std::nullopt, seed};
}

LabeledPoint SampleOracle::draw_labeled() {
    if (!truth_) throw std::logic_error("draw_labeled: oracle has no concept");
    const Point x = pmf_.draw(rng_);
    return {x, (*truth_)(x)};
}

Point SampleOracle::draw_unlabeled() { return pmf_.draw(rng_); }

std::vector<std::uint64_t> SampleOracle::multinomial(std::uint64_t m) {
    // Sequential conditional binomials.
    const auto mass = pmf_.mass();
    std::vector<std::uint64_t> counts(mass.size(), 0);
    std::uint64_t remaining = m;
    double mass_left = 1.0;
    for (std::size_t i = 0; i < mass.size() && remaining > 0; ++i) {
        if (mass[i] <= 0.0) continue;
        const double q = (i + 1 == mass.size() || mass[i] >= mass_left) ? 1.0 : mass[i] / mass_left;
        std::uint64_t k = remaining;
        if (q < 1.0) {
            std::binomial_distribution<long long> binom(static_cast<long long>(remaining), q);
            k = static_cast<std::uint64_t>(binom(rng_));
        }
        counts[i] = k;
        remaining -= k;
        mass_left -= mass[i];
    }
    if (remaining > 0) {
        // Rounding left residual mass unassigned; give it to the last positive point.
        for (std::size_t i = mass.size(); i-- > 0;) {
            if (mass[i] > 0.0) {
                counts[i] += remaining;
                break;
            }
        }
    }
    return counts;
}

SampleOracle::Counts SampleOracle::draw_counts(std::span<const Point> points, std::uint64_t m) {
    const auto all = multinomial(m);
    Counts out;
    out.counts.assign(points.size(), 0);
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i] == 0) continue;
        const Point x = pmf_.support()[i];
        auto it = std::lower_bound(points.begin(), points.end(), x);
        if (it != points.end() && *it == x)
            out.counts[static_cast<std::size_t>(it - points.begin())] += all[i];
        else
            out.outside += all[i];
    }
    return out;
}

std::vector<std::pair<LabeledPoint, std::uint64_t>> SampleOracle::draw_labeled_counts(std::uint64_t m) {
    if (!truth_) throw std::logic_error("draw_labeled_counts: oracle has no concept");
    const auto all = multinomial(m);
    std::vector<std::pair<LabeledPoint, std::uint64_t>> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i] == 0) continue;
        const Point x = pmf_.support()[i];
        out.push_back({{x, (*truth_)(x)}, all[i]});
    }
    return out;
}

}  // namespace covshift
