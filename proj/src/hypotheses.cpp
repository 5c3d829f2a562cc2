#include "covshift/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "exact.hpp"

namespace covshift {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// Exact error of h against c under p.
detail::Rational exact_error_rational(const Hypothesis& h, const Hypothesis& c, const DiscretePmf& p) {
    detail::Rational total(0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Point x = p.support()[i];
        if (p.mass()[i] > 0.0 && h(x) != c(x)) total += detail::to_rational(p.mass()[i]);
    }
    return total;
}

}  // namespace

Hypothesis Hypothesis::interval(Point a, Point b) {
    if (a > b) throw std::invalid_argument("interval: a > b (use empty_interval)");
    return Hypothesis(Interval{a, b, false});
}

Hypothesis Hypothesis::empty_interval() { return Hypothesis(Interval{}); }

Hypothesis Hypothesis::constant(bool label) { return Hypothesis(Constant{label}); }

Hypothesis Hypothesis::table(std::vector<std::pair<Point, bool>> entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].first == entries[i - 1].first)
            throw std::invalid_argument("table: duplicate point " + std::to_string(entries[i].first));
    }
    return Hypothesis(Table{std::move(entries)});
}

bool Hypothesis::operator()(Point x) const {
    return std::visit(Overloaded{
                          [x](const Interval& iv) { return !iv.empty && iv.a <= x && x <= iv.b; },
                          [](const Constant& k) { return k.label; },
                          [x](const Table& t) {
                              auto it = std::lower_bound(t.entries.begin(), t.entries.end(), x,
                                                         [](const auto& e, Point v) { return e.first < v; });
                              if (it == t.entries.end() || it->first != x)
                                  throw std::out_of_range("table hypothesis undefined at point " +
                                                          std::to_string(x));
                              return it->second;
                          },
                      },
                      rep_);
}

Hypothesis::Kind Hypothesis::kind() const noexcept {
    switch (rep_.index()) {
        case 0: return Kind::Interval;
        case 1: return Kind::Constant;
        default: return Kind::Table;
    }
}

bool Hypothesis::is_empty_interval() const noexcept {
    const auto* iv = std::get_if<Interval>(&rep_);
    return iv && iv->empty;
}

std::string Hypothesis::to_string() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const Interval& iv) {
                       if (iv.empty)
                           os << "empty";
                       else
                           os << "interval(" << iv.a << ',' << iv.b << ')';
                   },
                   [&](const Constant& k) { os << "const(" << (k.label ? 1 : 0) << ')'; },
                   [&](const Table& t) {
                       os << "table(";
                       for (std::size_t i = 0; i < t.entries.size(); ++i) {
                           if (i) os << ',';
                           os << '(' << t.entries[i].first << ',' << (t.entries[i].second ? 1 : 0) << ')';
                       }
                       os << ')';
                   },
               },
               rep_);
    return os.str();
}

HypothesisClass::HypothesisClass(Kind kind, std::vector<Hypothesis> members, std::string descriptor)
    : kind_(kind), members_(std::move(members)), descriptor_(std::move(descriptor)) {
    if (members_.empty()) throw std::invalid_argument("hypothesis class must be nonempty");
}

HypothesisClass HypothesisClass::intervals(int n) {
    if (n < 1) throw std::invalid_argument("intervals(n): n must be >= 1");
    std::vector<Hypothesis> members;
    members.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2 + 1);
    for (Point a = 1; a <= n; ++a) {
        for (Point b = a; b <= n; ++b) members.push_back(Hypothesis::interval(a, b));
    }
    members.push_back(Hypothesis::empty_interval());
    return {Kind::Intervals, std::move(members), "intervals(" + std::to_string(n) + ")"};
}

HypothesisClass HypothesisClass::lookup_tables(std::vector<Hypothesis> members) {
    std::string descriptor = "tables(";
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) descriptor += ';';
        descriptor += members[i].to_string();
    }
    descriptor += ')';
    return {Kind::LookupTables, std::move(members), std::move(descriptor)};
}

HypothesisClass HypothesisClass::all_tables(std::span<const Point> support) {
    if (support.empty()) throw std::invalid_argument("all_tables: empty support");
    if (support.size() > 20) throw std::invalid_argument("all_tables: support too large to enumerate");
    const std::size_t count = std::size_t{1} << support.size();
    std::vector<Hypothesis> members;
    members.reserve(count);
    for (std::size_t bits = 0; bits < count; ++bits) {
        std::vector<std::pair<Point, bool>> entries;
        entries.reserve(support.size());
        for (std::size_t j = 0; j < support.size(); ++j) entries.emplace_back(support[j], ((bits >> j) & 1U) != 0);
        members.push_back(Hypothesis::table(std::move(entries)));
    }
    std::string descriptor = "all_tables(" + std::to_string(support.size()) + ")";
    return {Kind::LookupTables, std::move(members), std::move(descriptor)};
}

double exact_error(const Hypothesis& h, const Hypothesis& c, const DiscretePmf& p) {
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Point x = p.support()[i];
        if (p.mass()[i] > 0.0 && h(x) != c(x)) total += p.mass()[i];
    }
    return std::min(total, 1.0);
}

double expected_loss(const Hypothesis& h, const Hypothesis& c, const DiscretePmf& p, const LossSpec& loss) {
    if (!(loss.bound > 0.0)) throw std::invalid_argument("loss bound M must be > 0");
    return loss.bound * exact_error(h, c, p);
}

double discrepancy(const DiscretePmf& p, const DiscretePmf& q, const HypothesisClass& hclass, const Hypothesis& c,
                   const LossSpec& loss) {
    double best = 0.0;
    for (const auto& h : hclass.members()) {
        best = std::max(best, std::abs(expected_loss(h, c, p, loss) - expected_loss(h, c, q, loss)));
    }
    return best;
}

ErmResult erm_select(std::span<const LabeledPoint> samples, const HypothesisClass& hclass) {
    // Collapse the sample to (negatives, positives) per distinct point.
    std::map<Point, std::pair<std::size_t, std::size_t>> tally;
    for (const auto& s : samples) {
        auto& [neg, pos] = tally[s.point];
        (s.label ? pos : neg) += 1;
    }

    ErmResult best{0, std::numeric_limits<std::size_t>::max()};
    const auto members = hclass.members();
    for (std::size_t k = 0; k < members.size(); ++k) {
        std::size_t mistakes = 0;
        for (const auto& [x, counts] : tally) {
            mistakes += members[k](x) ? counts.first : counts.second;
            if (mistakes >= best.mistakes) break;
        }
        if (mistakes < best.mistakes) {
            best = {k, mistakes};
            if (mistakes == 0) break;
        }
    }
    return best;
}

Hypothesis erm_learn(std::span<const LabeledPoint> samples, const HypothesisClass& hclass) {
    return hclass.members()[erm_select(samples, hclass).index];
}

std::uint64_t pac_sample_size(std::uint64_t class_size, double eps, double delta) {
    if (class_size < 1) throw std::invalid_argument("pac_sample_size: class_size must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("pac_sample_size: eps must be in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("pac_sample_size: delta must be in (0,1)");
    const double m = (std::log(static_cast<double>(class_size)) + std::log(1.0 / delta)) / eps;
    return static_cast<std::uint64_t>(std::ceil(m));
}

BoundCheck check_theorem1_bound(const Hypothesis& h, const Hypothesis& c, const DiscretePmf& source,
                                const DiscretePmf& target) {
    const auto ratio = weight_ratio(source, target);
    if (ratio.violated()) throw WeightRatioViolation(ratio.witness_point);

    // Exact W = s*/t*, re-minimized in rationals so near-ties cannot flip.
    detail::Rational s_star(1);
    detail::Rational t_star(0);
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (!(target.mass()[i] > 0.0)) continue;
        const auto t = detail::to_rational(target.mass()[i]);
        const auto s = detail::to_rational(source(target.support()[i]));
        if (t_star == 0 || s * t_star < s_star * t) {
            s_star = s;
            t_star = t;
        }
    }
    const auto err_s = exact_error_rational(h, c, source);
    const auto err_t = exact_error_rational(h, c, target);

    BoundCheck check;
    check.lhs = detail::to_double(err_t);
    check.rhs = ratio.w() * detail::to_double(err_s);
    // err_t <= (t*/s*) err_s  <=>  err_t * s* <= err_s * t*
    check.holds = err_t * s_star <= err_s * t_star;
    return check;
}

BoundCheck check_prop2_bound(const Hypothesis& h, const Hypothesis& c, const DiscretePmf& source,
                             const DiscretePmf& target) {
    detail::Rational abs_diff(0);
    for (Point x : union_support(source, target)) {
        abs_diff += detail::abs(detail::to_rational(source(x)) - detail::to_rational(target(x)));
    }
    // 2 d = sum |p - q|
    const auto err_s = exact_error_rational(h, c, source);
    const auto err_t = exact_error_rational(h, c, target);

    BoundCheck check;
    check.lhs = detail::to_double(err_t);
    check.rhs = detail::to_double(err_s) + 2.0 * l1_distance(source, target).l1;
    check.holds = err_t <= err_s + abs_diff;
    return check;
}

}  // namespace covshift
