#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "covshift/distributions.hpp"
#include "covshift/hypotheses.hpp"
#include "covshift/rng.hpp"

namespace covshift {

/// Disjoint-support Left/Right instance over {1..n}: left is uniform on the
/// lower half (label 0), right uniform on the upper half (label 1), and the
/// source is their fair mixture. The unlabeled target equals the source.
struct LeftRightInstance {
    int n = 0;
    DiscretePmf left;
    DiscretePmf right;
    DiscretePmf source;
    Hypothesis truth;
    std::size_t l = 0;  // draws in the L sample set
    std::size_t r = 0;  // draws in the R sample set
    std::size_t m = 0;  // draws in the M sample set
    double gamma = 0.0;
};

/// Throws std::invalid_argument for odd n or n < 2.
LeftRightInstance make_left_right(int n);

/// Lookup table over `support`: stored labels on seen points, a fair coin
/// (drawn from `rng` at construction, in support order) everywhere else.
/// `support` must be sorted; samples off the support are ignored.
Hypothesis memorization_learner(std::span<const LabeledPoint> samples, std::span<const Point> support, Rng& rng);

struct HardnessRow {
    int n = 0;
    std::uint64_t k = 0;
    std::uint64_t trials = 0;
    double mean_error = 0.0;
    double analytic_error = 0.0;  // (1/2)((n-1)/n)^k
    double pessimistic_error = 0.0;  // (1/2)((n-1)/n)^k + (1 - ((n-1)/n)^k): seen points also counted wrong
    double std_err = 0.0;
};

/// (1/2)((n-1)/n)^k, expected memorization error on the uniform instance.
double memorization_error_analytic(int n, std::uint64_t k);

/// Monte Carlo error of the memorization learner trained on k source draws.
/// Trial t at draw count k uses derive_seed(derive_seed(seed, k), t), so the
/// result does not depend on `workers`.
std::vector<HardnessRow> hardness_curve(int n, std::span<const std::uint64_t> ks, std::uint64_t trials,
                                        std::uint64_t seed, unsigned workers = 1);

/// Same instance, but the learner is ERM over every lookup table on the support.
HardnessRow erm_tables_error(int n, std::uint64_t k, std::uint64_t trials, std::uint64_t seed);

/// Smallest k with analytic error <= threshold, and its real-valued solution
/// ln(1/(2 threshold)) / ln(n/(n-1)).
std::uint64_t analytic_crossing(int n, double threshold);
double analytic_crossing_real(int n, double threshold);

/// Smallest k whose Monte Carlo mean error is <= threshold (k scanned upward
/// from 0, at most `k_max`).
std::optional<std::uint64_t> empirical_crossing(int n, double threshold, std::uint64_t trials, std::uint64_t seed,
                                                std::uint64_t k_max, unsigned workers = 1);

}  // namespace covshift
