#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "covshift/distributions.hpp"
#include "covshift/oracles.hpp"

namespace covshift {

/// Raw frequency estimate over a fixed support. `outside` counts draws that
/// fell off the support (after truncation), so counts + outside == m.
struct EmpiricalEstimate {
    std::vector<Point> support;
    std::vector<std::uint64_t> counts;
    std::vector<double> phat;
    std::uint64_t m = 0;
    std::uint64_t outside = 0;
    bool injected = false;  // phat copied from a known pmf, no draws

    /// Exact estimate: phat equals the pmf's mass on `support`.
    static EmpiricalEstimate from_pmf(const DiscretePmf& p, std::span<const Point> support);

    [[nodiscard]] double at(Point x) const noexcept;
};

enum class EstimationMode {
    Multinomial,  // one multinomial draw, O(n)
    Streaming,    // m individual oracle calls
};

EmpiricalEstimate estimate_pmf(SampleOracle& oracle, std::uint64_t m, std::span<const Point> support,
                               EstimationMode mode = EstimationMode::Multinomial);

/// ceil((ln(4n) + ln(1/delta)) * 2^11 * n * w^2 / eps^3).
std::uint64_t chernoff_sample_size(std::uint64_t n, double w, double eps, double delta);

/// eps / (2 n w): points at or above this source mass are heavy.
double heavy_cutoff(std::uint64_t n, double w, double eps);

/// ceil(2 s sqrt(2/eps)). eps >= 1 is rejected unless `allow_large_eps`.
std::uint64_t chebyshev_support_size(double s, double eps, bool allow_large_eps = false);

struct BudgetPlan {
    std::uint64_t n = 0;
    double w = 1.0;
    double eps = 0.0;
    double delta = 0.0;
    std::uint64_t m1 = 0;
    double heavy_cutoff = 0.0;

    static BudgetPlan make(std::uint64_t n, double w, double eps, double delta);
};

struct HeavyLightSplit {
    std::vector<Point> heavy;
    std::vector<Point> light;
};

/// Throws std::invalid_argument when the pmf has more points than plan.n.
HeavyLightSplit heavy_points(const DiscretePmf& p, const BudgetPlan& plan);
HeavyLightSplit heavy_points(const EmpiricalEstimate& est, const BudgetPlan& plan);

}  // namespace covshift
