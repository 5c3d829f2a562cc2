#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "covshift/distributions.hpp"

namespace covshift {

struct LabeledPoint {
    Point point = 0;
    bool label = false;

    friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

/// Total boolean labeling of integer points: an interval [a,b] -> 1 (possibly
/// empty), a constant, or an explicit lookup table. The ground-truth labeling
/// is itself a Hypothesis.
class Hypothesis {
public:
    enum class Kind { Interval, Constant, Table };

    /// The empty interval (constant 0).
    Hypothesis() : rep_(Interval{}) {}

    static Hypothesis interval(Point a, Point b);
    static Hypothesis empty_interval();
    static Hypothesis constant(bool label);
    /// Throws std::invalid_argument on duplicate points.
    static Hypothesis table(std::vector<std::pair<Point, bool>> entries);

    /// Throws std::out_of_range when a table is queried off its domain.
    [[nodiscard]] bool operator()(Point x) const;

    [[nodiscard]] Kind kind() const noexcept;
    [[nodiscard]] bool is_empty_interval() const noexcept;
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Hypothesis&, const Hypothesis&) = default;

private:
    struct Interval {
        Point a = 0;
        Point b = -1;
        bool empty = true;
        friend bool operator==(const Interval&, const Interval&) = default;
    };
    struct Constant {
        bool label = false;
        friend bool operator==(const Constant&, const Constant&) = default;
    };
    struct Table {
        std::vector<std::pair<Point, bool>> entries;  // sorted by point
        friend bool operator==(const Table&, const Table&) = default;
    };

    explicit Hypothesis(std::variant<Interval, Constant, Table> rep) : rep_(std::move(rep)) {}

    std::variant<Interval, Constant, Table> rep_;
};

/// Finite, deterministically enumerated hypothesis class.
class HypothesisClass {
public:
    enum class Kind { Intervals, LookupTables };

    /// All intervals over {1..n} ordered by (a,b), then the empty interval:
    /// n(n+1)/2 + 1 members.
    static HypothesisClass intervals(int n);
    static HypothesisClass lookup_tables(std::vector<Hypothesis> members);
    /// Every labeling of `support` (2^|support| tables), in binary counting
    /// order with bit j giving the label of support[j].
    static HypothesisClass all_tables(std::span<const Point> support);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::span<const Hypothesis> members() const noexcept { return members_; }
    [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
    /// "intervals(n)" or "tables(...)".
    [[nodiscard]] const std::string& descriptor() const noexcept { return descriptor_; }

private:
    HypothesisClass(Kind kind, std::vector<Hypothesis> members, std::string descriptor);

    Kind kind_;
    std::vector<Hypothesis> members_;
    std::string descriptor_;
};

/// Loss bounded by M; only the 0/1 PAC loss scaled by M is modelled.
struct LossSpec {
    double bound = 1.0;

    static LossSpec pac() { return {}; }
};

double exact_error(const Hypothesis& h, const Hypothesis& c, const DiscretePmf& p);
double expected_loss(const Hypothesis& h, const Hypothesis& c, const DiscretePmf& p, const LossSpec& loss);

/// max over the class of |L_p(h) - L_q(h)|.
double discrepancy(const DiscretePmf& p, const DiscretePmf& q, const HypothesisClass& hclass,
                   const Hypothesis& c, const LossSpec& loss = LossSpec::pac());

struct ErmResult {
    std::size_t index = 0;
    std::size_t mistakes = 0;
};

/// First member in enumeration order with the fewest empirical mistakes.
ErmResult erm_select(std::span<const LabeledPoint> samples, const HypothesisClass& hclass);
Hypothesis erm_learn(std::span<const LabeledPoint> samples, const HypothesisClass& hclass);

/// ceil((ln|H| + ln(1/delta)) / eps), the realizable finite-class bound.
std::uint64_t pac_sample_size(std::uint64_t class_size, double eps, double delta);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;  // decided in exact rational arithmetic
};

/// error_target(h) <= w * error_source(h), w = 1 / W(source, target).
/// Throws WeightRatioViolation when the ratio is undefined.
BoundCheck check_theorem1_bound(const Hypothesis& h, const Hypothesis& c, const DiscretePmf& source,
                                const DiscretePmf& target);

/// error_target(h) <= error_source(h) + 2 d(source, target).
BoundCheck check_prop2_bound(const Hypothesis& h, const Hypothesis& c, const DiscretePmf& source,
                             const DiscretePmf& target);

}  // namespace covshift
