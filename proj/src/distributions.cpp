#include "covshift/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace covshift {

namespace {

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

void normalize_in_place(std::vector<double>& mass) {
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (total != 1.0) {
        for (double& m : mass) m /= total;
    }
}

}  // namespace

DiscretePmf::DiscretePmf(std::vector<Point> support, std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
    if (support_.empty()) throw std::invalid_argument("pmf: empty support");
    if (support_.size() != mass_.size())
        throw std::invalid_argument("pmf: support and mass lengths differ");
    for (std::size_t i = 1; i < support_.size(); ++i) {
        if (support_[i] <= support_[i - 1])
            throw std::invalid_argument("pmf: support must be strictly increasing");
    }
    double total = 0.0;
    for (double m : mass_) {
        if (!std::isfinite(m) || m < 0.0) throw std::invalid_argument("pmf: masses must be finite and >= 0");
        total += m;
    }
    if (std::abs(total - 1.0) > kSumTolerance)
        throw std::invalid_argument("pmf: masses sum to " + format_double(total) + ", expected 1");
    // Sums off by rounding only are kept as given, so literals round-trip.
    if (std::abs(total - 1.0) > kRoundoffTolerance) normalize_in_place(mass_);

    bool clamped = false;
    for (double& m : mass_) {
        if (m > 0.0 && m < kDustCutoff) {
            m = 0.0;
            clamped = true;
        }
    }
    if (clamped) normalize_in_place(mass_);

    cdf_.resize(mass_.size());
    std::partial_sum(mass_.begin(), mass_.end(), cdf_.begin());
}

DiscretePmf DiscretePmf::from_pairs(std::vector<std::pair<Point, double>> pairs) {
    std::vector<Point> support;
    std::vector<double> mass;
    support.reserve(pairs.size());
    mass.reserve(pairs.size());
    for (auto& [x, m] : pairs) {
        support.push_back(x);
        mass.push_back(m);
    }
    return {std::move(support), std::move(mass)};
}

DiscretePmf DiscretePmf::from_weights(std::vector<Point> support, std::vector<double> weights) {
    double total = 0.0;
    for (double v : weights) {
        if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("pmf: weights must be finite and >= 0");
        total += v;
    }
    if (!(total > 0.0)) throw std::invalid_argument("pmf: weights sum to zero");
    if (total != 1.0) {
        for (double& v : weights) v /= total;
    }
    return {std::move(support), std::move(weights)};
}

DiscretePmf DiscretePmf::point_mass(Point x) { return {{x}, {1.0}}; }

DiscretePmf DiscretePmf::uniform(Point lo, Point hi) {
    if (lo > hi) throw std::invalid_argument("uniform: lo > hi");
    const auto n = static_cast<std::size_t>(hi - lo + 1);
    std::vector<Point> support(n);
    std::iota(support.begin(), support.end(), lo);
    return {std::move(support), std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

DiscretePmf DiscretePmf::binomial(int n, double p) {
    if (n < 0) throw std::invalid_argument("binomial: n < 0");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p outside [0,1]");
    std::vector<Point> support(static_cast<std::size_t>(n) + 1);
    std::vector<double> mass(support.size());
    for (int k = 0; k <= n; ++k) {
        support[static_cast<std::size_t>(k)] = k;
        // lgamma keeps large n finite; p in {0,1} handled by pow
        const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        mass[static_cast<std::size_t>(k)] = std::exp(log_choose) * std::pow(p, k) * std::pow(1.0 - p, n - k);
    }
    return from_weights(std::move(support), std::move(mass));
}

DiscretePmf DiscretePmf::geometric_truncated(double p, int n) {
    if (n < 1) throw std::invalid_argument("geometric_truncated: n < 1");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geometric_truncated: p outside (0,1]");
    std::vector<Point> support(static_cast<std::size_t>(n));
    std::vector<double> mass(support.size());
    for (int k = 1; k <= n; ++k) {
        support[static_cast<std::size_t>(k - 1)] = k;
        mass[static_cast<std::size_t>(k - 1)] = p * std::pow(1.0 - p, k - 1);
    }
    return from_weights(std::move(support), std::move(mass));
}

std::optional<std::size_t> DiscretePmf::index_of(Point x) const noexcept {
    auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it == support_.end() || *it != x) return std::nullopt;
    return static_cast<std::size_t>(it - support_.begin());
}

double DiscretePmf::operator()(Point x) const noexcept {
    auto i = index_of(x);
    return i ? mass_[*i] : 0.0;
}

double DiscretePmf::mean() const noexcept {
    double mu = 0.0;
    for (std::size_t i = 0; i < size(); ++i) mu += static_cast<double>(support_[i]) * mass_[i];
    return mu;
}

double DiscretePmf::variance() const noexcept {
    const double mu = mean();
    double var = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const double d = static_cast<double>(support_[i]) - mu;
        var += d * d * mass_[i];
    }
    return var;
}

double DiscretePmf::std_dev() const noexcept { return std::sqrt(variance()); }

Point DiscretePmf::draw(Rng& rng) const {
    // Scale by the final cdf entry so rounding in the partial sums never
    // leaves a gap at the top.
    const double u = uniform01(rng) * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    auto i = static_cast<std::size_t>(it - cdf_.begin());
    if (i >= support_.size()) {
        i = support_.size() - 1;
        while (i > 0 && mass_[i] == 0.0) --i;
    }
    return support_[i];
}

std::string DiscretePmf::to_literal() const {
    std::ostringstream os;
    os << "custom(";
    for (std::size_t i = 0; i < size(); ++i) {
        if (i) os << ',';
        os << '(' << support_[i] << ',' << format_double(mass_[i]) << ')';
    }
    os << ')';
    return os.str();
}

double WeightRatioReport::w() const {
    if (!ratio) throw WeightRatioViolation(witness_point);
    return 1.0 / *ratio;
}

WeightRatioViolation::WeightRatioViolation(Point point)
    : std::domain_error("weight ratio violated: target mass at point " + std::to_string(point) +
                        " where source mass is 0"),
      point_(point) {}

std::vector<Point> union_support(const DiscretePmf& p, const DiscretePmf& q) {
    std::vector<Point> out;
    out.reserve(p.size() + q.size());
    std::set_union(p.support().begin(), p.support().end(), q.support().begin(), q.support().end(),
                   std::back_inserter(out));
    return out;
}

DistanceReport l1_distance(const DiscretePmf& p, const DiscretePmf& q) {
    DistanceReport report;
    double total = 0.0;
    for (Point x : union_support(p, q)) {
        const double a = p(x);
        const double b = q(x);
        total += std::abs(a - b);
        if (a > b) report.witness_event.push_back(x);
    }
    report.l1 = 0.5 * total;
    return report;
}

WeightRatioReport weight_ratio(const DiscretePmf& source, const DiscretePmf& target) {
    WeightRatioReport report;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double t = target.mass()[i];
        if (t <= 0.0) continue;
        const Point x = target.support()[i];
        const double s = source(x);
        if (s <= 0.0) {
            report.ratio.reset();
            report.witness_point = x;
            return report;
        }
        const double r = s / t;
        if (!report.ratio || r < *report.ratio) {
            report.ratio = r;
            report.witness_point = x;
        }
    }
    return report;
}

std::vector<Point> sample(const DiscretePmf& p, Rng& rng, std::size_t m) {
    std::vector<Point> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.push_back(p.draw(rng));
    return out;
}

Truncation truncate(const DiscretePmf& p, Point lo, Point hi) {
    if (lo > hi) throw std::invalid_argument("truncate: lo > hi");
    std::vector<Point> support;
    std::vector<double> mass;
    double kept = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Point x = p.support()[i];
        if (x < lo || x > hi) continue;
        support.push_back(x);
        mass.push_back(p.mass()[i]);
        kept += p.mass()[i];
    }
    if (support.empty() || !(kept > 0.0))
        throw std::invalid_argument("truncate: window [" + std::to_string(lo) + "," + std::to_string(hi) +
                                    "] drops all mass");
    return {DiscretePmf::from_weights(std::move(support), std::move(mass)), std::max(0.0, 1.0 - kept)};
}

std::pair<Point, Point> chebyshev_window(const DiscretePmf& p, double s, double eps) {
    if (!(s > 0.0)) throw std::invalid_argument("chebyshev_window: s must be > 0");
    if (!(eps > 0.0)) throw std::invalid_argument("chebyshev_window: eps must be > 0");
    const double k = s * std::sqrt(2.0 / eps);
    const double mu = p.mean();
    return {static_cast<Point>(std::ceil(mu - k)), static_cast<Point>(std::floor(mu + k))};
}

}  // namespace covshift
