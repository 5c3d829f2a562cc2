#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covshift/rng.hpp"

namespace covshift {

using Point = std::int64_t;

/// Finite probability mass function over strictly increasing integer points.
///
/// Masses are validated (non-negative, summing to 1 within 1e-9) and
/// normalized unless the sum is off by rounding only (1e-12). Masses below
/// 1e-15 are clamped to zero before a final renormalization.
/// Zero-mass points stay in the support. Instances are immutable.
class DiscretePmf {
public:
    static constexpr double kSumTolerance = 1e-9;
    static constexpr double kRoundoffTolerance = 1e-12;
    static constexpr double kDustCutoff = 1e-15;

    DiscretePmf(std::vector<Point> support, std::vector<double> mass);

    static DiscretePmf from_pairs(std::vector<std::pair<Point, double>> pairs);
    /// Normalizes arbitrary non-negative weights instead of requiring unit sum.
    static DiscretePmf from_weights(std::vector<Point> support, std::vector<double> weights);

    static DiscretePmf point_mass(Point x);
    static DiscretePmf uniform(Point lo, Point hi);
    /// Binomial(n, p) on {0..n}.
    static DiscretePmf binomial(int n, double p);
    /// Geometric(p) on {1..n}, renormalized.
    static DiscretePmf geometric_truncated(double p, int n);

    [[nodiscard]] std::span<const Point> support() const noexcept { return support_; }
    [[nodiscard]] std::span<const double> mass() const noexcept { return mass_; }
    [[nodiscard]] std::size_t size() const noexcept { return support_.size(); }

    /// Mass at x; 0 for points outside the support.
    [[nodiscard]] double operator()(Point x) const noexcept;
    [[nodiscard]] std::optional<std::size_t> index_of(Point x) const noexcept;

    [[nodiscard]] double mean() const noexcept;
    [[nodiscard]] double variance() const noexcept;
    [[nodiscard]] double std_dev() const noexcept;

    /// Draw one point by inverting the cumulative table.
    [[nodiscard]] Point draw(Rng& rng) const;

    /// Literal form `custom((p0,m0),(p1,m1),...)`, masses printed round-trip exact.
    [[nodiscard]] std::string to_literal() const;

    friend bool operator==(const DiscretePmf& a, const DiscretePmf& b) {
        return a.support_ == b.support_ && a.mass_ == b.mass_;
    }

private:
    std::vector<Point> support_;
    std::vector<double> mass_;
    std::vector<double> cdf_;
};

struct DistanceReport {
    double l1 = 0.0;
    std::vector<Point> witness_event;  // {i : p(i) > q(i)}
};

/// W(source, target) = min over target-positive points of source(i)/target(i).
struct WeightRatioReport {
    std::optional<double> ratio;  // empty when violated
    Point witness_point = 0;

    [[nodiscard]] bool violated() const noexcept { return !ratio.has_value(); }
    /// w = 1 / ratio. Throws WeightRatioViolation when violated.
    [[nodiscard]] double w() const;
};

/// Raised when the target puts mass where the source has none.
class WeightRatioViolation : public std::domain_error {
public:
    explicit WeightRatioViolation(Point point);
    [[nodiscard]] Point point() const noexcept { return point_; }

private:
    Point point_;
};

struct Truncation {
    DiscretePmf pmf;
    double dropped_mass = 0.0;
};

/// Sorted union of both supports.
std::vector<Point> union_support(const DiscretePmf& p, const DiscretePmf& q);

DistanceReport l1_distance(const DiscretePmf& p, const DiscretePmf& q);
WeightRatioReport weight_ratio(const DiscretePmf& source, const DiscretePmf& target);

std::vector<Point> sample(const DiscretePmf& p, Rng& rng, std::size_t m);

/// Restrict to [lo, hi] and renormalize. Throws std::invalid_argument when
/// lo > hi or when no mass survives.
Truncation truncate(const DiscretePmf& p, Point lo, Point hi);

/// Integer window [ceil(mean - k), floor(mean + k)] with k = s*sqrt(2/eps).
/// By Chebyshev it keeps at least 1 - eps/2 of the mass when std_dev <= s.
std::pair<Point, Point> chebyshev_window(const DiscretePmf& p, double s, double eps);

}  // namespace covshift
