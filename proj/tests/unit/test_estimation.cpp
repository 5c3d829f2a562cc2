#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covshift/estimation.hpp"
#include "reference.hpp"

using namespace covshift;

TEST_SUITE("estimation") {

TEST_CASE("point mass and single draw estimates") {
    const Point support[] = {1, 2, 3};
    auto o = SampleOracle::unlabeled(DiscretePmf::point_mass(2), 1);
    const auto e = estimate_pmf(o, 1000, support);
    CHECK(e.phat == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(e.m == 1000);

    auto u = SampleOracle::unlabeled(DiscretePmf::uniform(1, 3), 5);
    for (auto mode : {EstimationMode::Multinomial, EstimationMode::Streaming}) {
        const auto one = estimate_pmf(u, 1, support, mode);
        CHECK(std::accumulate(one.phat.begin(), one.phat.end(), 0.0) == 1.0);
        CHECK(std::count(one.phat.begin(), one.phat.end(), 1.0) == 1);
    }
    CHECK_THROWS_AS(estimate_pmf(u, 0, support), std::invalid_argument);
}

TEST_CASE("estimates concentrate and counts add up") {
    const Point support[] = {1, 2};
    for (auto mode : {EstimationMode::Multinomial, EstimationMode::Streaming}) {
        auto o = SampleOracle::unlabeled(DiscretePmf::uniform(1, 2), 12);
        const auto e = estimate_pmf(o, 1000000, support, mode);
        CHECK(std::abs(e.phat[0] - 0.5) <= 0.005);
        CHECK(std::abs(e.phat[1] - 0.5) <= 0.005);
        CHECK(e.counts[0] + e.counts[1] + e.outside == e.m);
    }
    const Point part[] = {2, 3};
    auto o = SampleOracle::unlabeled(DiscretePmf::uniform(1, 4), 9);
    const auto e = estimate_pmf(o, 4000, part);
    CHECK(e.counts[0] + e.counts[1] + e.outside == 4000);
    CHECK(e.outside > 0);
}

TEST_CASE("estimates are unbiased over 1000 trials") {
    const auto p = DiscretePmf::from_weights({1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 6});
    const std::vector<Point> support(p.support().begin(), p.support().end());
    const int trials = 1000;
    const std::uint64_t m = 50;
    std::vector<double> avg(support.size(), 0.0);
    for (int t = 0; t < trials; ++t) {
        auto o = SampleOracle::unlabeled(p, derive_seed(8080, t));
        const auto e = estimate_pmf(o, m, support);
        for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += e.phat[i] / trials;
    }
    for (std::size_t i = 0; i < avg.size(); ++i) {
        const double q = p.mass()[i];
        const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(m * trials));
        CHECK(std::abs(avg[i] - q) <= 3.0 * sigma);
    }
}

TEST_CASE("Chernoff budget values") {
    CHECK(chernoff_sample_size(1, 1.0, 0.99, 0.99) == 2948);
    // Exact evaluation of ln(160) * 2^11 * 8 * 4 * 64 rounds up to this value.
    CHECK(chernoff_sample_size(8, 2.0, 0.25, 0.2) == 21286822);
    CHECK_THROWS_AS(chernoff_sample_size(1, 1.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(chernoff_sample_size(0, 1.0, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(chernoff_sample_size(1, 0.5, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(chernoff_sample_size(1, 1.0, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(chernoff_sample_size(1u << 30, 1e6, 1e-6, 0.5), std::overflow_error);
}

TEST_CASE("Chernoff budget scales with n, w and eps") {
    const double base = static_cast<double>(chernoff_sample_size(8, 2.0, 0.1, 0.2));
    CHECK(chernoff_sample_size(8, 4.0, 0.1, 0.2) / base == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(chernoff_sample_size(8, 2.0, 0.05, 0.2) / base == doctest::Approx(8.0).epsilon(1e-6));
    const double logs8 = std::log(32.0) + std::log(5.0);
    const double logs16 = std::log(64.0) + std::log(5.0);
    CHECK(chernoff_sample_size(16, 2.0, 0.1, 0.2) / base == doctest::Approx(2.0 * logs16 / logs8).epsilon(1e-6));
}

TEST_CASE("heavy cutoff and split") {
    CHECK(heavy_cutoff(8, 2.0, 0.25) == 0.0078125);
    const auto plan = BudgetPlan::make(8, 2.0, 0.25, 0.2);
    CHECK(plan.heavy_cutoff == 0.0078125);
    CHECK(plan.m1 == chernoff_sample_size(8, 2.0, 0.25, 0.2));

    const auto split = heavy_points(DiscretePmf::uniform(1, 8), plan);
    CHECK(split.heavy.size() == 8);
    CHECK(split.light.empty());

    const DiscretePmf z({1, 2, 3}, {0.5, 0.0, 0.5});
    const auto zs = heavy_points(z, plan);
    CHECK(zs.light == std::vector<Point>{2});

    CHECK_THROWS_AS(heavy_points(DiscretePmf::uniform(1, 9), plan), std::invalid_argument);
}

TEST_CASE("Chebyshev support size") {
    CHECK(chebyshev_support_size(1.0, 0.08) == 10);
    CHECK(chebyshev_support_size(5.0, 0.08) == 50);
    CHECK(chebyshev_support_size(0.5, 0.5) == 2);
    CHECK_THROWS_AS(chebyshev_support_size(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(chebyshev_support_size(1.0, 1.5), std::invalid_argument);
    CHECK(chebyshev_support_size(1.0, 2.0, true) == 2);
}

TEST_CASE("heavy points are estimated within eps/16 at the Chernoff budget") {
    // n = 8, w = 2; one point light on purpose.
    const auto p = DiscretePmf::from_weights({1, 2, 3, 4, 5, 6, 7, 8}, {0.001, 1, 2, 3, 4, 5, 6, 7});
    const std::vector<Point> support(p.support().begin(), p.support().end());
    const double eps = 0.5, delta = 0.2;
    const auto plan = BudgetPlan::make(8, 2.0, eps, delta);
    const auto split = heavy_points(p, plan);
    CHECK(split.light == std::vector<Point>{1});

    const int trials = 200;
    int bad = 0;
    for (int t = 0; t < trials; ++t) {
        auto o = SampleOracle::unlabeled(p, derive_seed(55, t));
        const auto e = estimate_pmf(o, plan.m1, support);
        bool ok = true;
        for (Point x : split.heavy) ok = ok && std::abs(e.at(x) - p(x)) <= p(x) * eps / 16.0;
        bad += !ok;
    }
    CHECK(static_cast<double>(bad) / trials <= delta + 3.0 * std::sqrt(delta * (1.0 - delta) / trials));
}

}  // TEST_SUITE
