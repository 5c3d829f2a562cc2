#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "covshift/distributions.hpp"
#include "covshift/hypotheses.hpp"
#include "covshift/rng.hpp"

namespace covshift {

/// Example oracle EX(c, D) or EX(D). Algorithms only see draws; the pmf and
/// truth stay private. Not thread-safe: one oracle per worker.
class SampleOracle {
public:
    static SampleOracle labeled(DiscretePmf pmf, Hypothesis truth, std::uint64_t seed);
    static SampleOracle unlabeled(DiscretePmf pmf, std::uint64_t seed);

    [[nodiscard]] bool is_labeled() const noexcept { return truth_.has_value(); }

    /// Throws std::logic_error on an unlabeled oracle.
    LabeledPoint draw_labeled();
    Point draw_unlabeled();

    struct Counts {
        std::vector<std::uint64_t> counts;  // aligned with the requested points
        std::uint64_t outside = 0;          // draws that landed on other points
    };

    /// Counts of m draws, realized as one multinomial draw.
    Counts draw_counts(std::span<const Point> points, std::uint64_t m);

    /// m labeled draws grouped by point (multinomial), zero counts omitted.
    std::vector<std::pair<LabeledPoint, std::uint64_t>> draw_labeled_counts(std::uint64_t m);

private:
    SampleOracle(DiscretePmf pmf, std::optional<Hypothesis> truth, std::uint64_t seed);

    std::vector<std::uint64_t> multinomial(std::uint64_t m);

    DiscretePmf pmf_;
    std::optional<Hypothesis> truth_;
    Rng rng_;
};

}  // namespace covshift
