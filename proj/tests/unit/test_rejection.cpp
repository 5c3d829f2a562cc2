#include <doctest.h>

#include <cmath>
#include <numeric>

#include "covshift/rejection.hpp"
#include "reference.hpp"

using namespace covshift;

namespace {

EmpiricalEstimate est(std::vector<Point> support, std::vector<double> phat) {
    EmpiricalEstimate e;
    e.support = std::move(support);
    e.phat = std::move(phat);
    e.counts.assign(e.phat.size(), 0);
    return e;
}

const DiscretePmf kUniform8 = DiscretePmf::uniform(1, 8);
const DiscretePmf kSkewed8({1, 2, 3, 4, 5, 6, 7, 8},
                           {0.0625, 0.0625, 0.0625, 0.0625, 0.125, 0.125, 0.25, 0.25});

}  // namespace

TEST_SUITE("rejection") {

TEST_CASE("plan acceptance examples") {
    const auto same = build_plan(est({1, 2}, {0.5, 0.5}), est({1, 2}, {0.5, 0.5}), 10, 1.0, 0.1);
    CHECK(same.acceptance == std::vector<double>{1.0, 1.0});
    CHECK(same.m2_budget == static_cast<std::uint64_t>(std::ceil(10 * std::log(40.0))));

    const auto two = build_plan(est({1, 2}, {0.5, 0.5}), est({1, 2}, {0.75, 0.25}), 10, 1.5, 0.1);
    CHECK(two.acceptance[0] == 1.0);
    CHECK(two.acceptance[1] == doctest::Approx(1.0 / 3.0));
    CHECK(two.max_ratio == doctest::Approx(1.5));

    CHECK(rejection_budget(100, 2.0, 0.1) == 1476);

    const auto zero = build_plan(est({1, 2, 3}, {0.5, 0.0, 0.5}), est({1, 2, 3}, {0.2, 0.4, 0.4}), 10, 2.0, 0.1);
    CHECK(zero.acceptance[1] == 0.0);
    CHECK(zero.acceptance[2] == 1.0);

    CHECK_THROWS_AS(build_plan(est({1, 2}, {1.0, 0.0}), est({1, 2}, {0.0, 1.0}), 10, 1.0, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_plan(est({1, 2}, {0.5, 0.5}), est({1, 3}, {0.5, 0.5}), 10, 1.0, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_plan(est({1}, {1.0}), est({1}, {1.0}), 0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("plan invariants on random estimates") {
    Rng rng = make_rng(6);
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = 1 + rng() % 12;
        const auto s = ref::random_pmf(rng, n, 0.2);
        const auto t = ref::random_pmf(rng, n, 0.2);
        const std::vector<Point> support(s.support().begin(), s.support().end());
        RejectionPlan plan;
        try {
            plan = build_plan(EmpiricalEstimate::from_pmf(s, support), EmpiricalEstimate::from_pmf(t, support), 5,
                              1.0, 0.1);
        } catch (const std::invalid_argument&) {
            continue;  // no point with both estimates positive
        }
        int ones = 0;
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(plan.acceptance[j] >= 0.0);
            CHECK(plan.acceptance[j] <= 1.0);
            ones += plan.acceptance[j] == 1.0;
            if (s.mass()[j] == 0.0 || t.mass()[j] == 0.0) CHECK(plan.acceptance[j] == 0.0);
        }
        CHECK(ones >= 1);
    }
}

TEST_CASE("rejection sampling edge cases") {
    auto plan = build_plan(est({1, 2}, {0.5, 0.5}), est({1, 2}, {0.5, 0.5}), 10, 1.0, 0.1);
    auto src = SampleOracle::labeled(DiscretePmf::uniform(1, 2), Hypothesis::interval(2, 2), 3);
    Rng rng = make_rng(4);
    for (auto mode : {ThinningMode::Streaming, ThinningMode::Binomial}) {
        const auto all = rejection_sample(src, plan, rng, mode);
        CHECK(all.accepted == plan.m2_budget);
        CHECK(all.drawn == plan.m2_budget);
        CHECK(all.acceptance_rate == 1.0);
        CHECK_FALSE(all.shortfall);
    }

    auto one = build_plan(est({1, 2}, {0.5, 0.5}), est({1, 2}, {0.0, 1.0}), 10, 2.0, 0.1);
    for (auto mode : {ThinningMode::Streaming, ThinningMode::Binomial}) {
        const auto kept = rejection_sample(src, one, rng, mode);
        for (const auto& e : kept.dataset) CHECK(e == LabeledPoint{2, true});
        CHECK(kept.accepted <= kept.drawn);
    }
}

TEST_CASE("two-point acceptance rate is 2/3") {
    RejectionPlan plan = build_plan(est({1, 2}, {0.5, 0.5}), est({1, 2}, {0.75, 0.25}), 1, 1.5, 0.5);
    plan.m2_budget = 100000;
    const double expected = 2.0 / 3.0;
    const double sigma = std::sqrt(expected * (1 - expected) / 1e5);
    for (auto mode : {ThinningMode::Streaming, ThinningMode::Binomial}) {
        auto src = SampleOracle::labeled(DiscretePmf::uniform(1, 2), Hypothesis{}, 21);
        Rng rng = make_rng(22);
        const auto r = rejection_sample(src, plan, rng, mode);
        CHECK(std::abs(r.acceptance_rate - expected) <= 3.0 * sigma);
    }
}

TEST_CASE("analytic D_f") {
    const auto u = DiscretePmf::uniform(1, 2);
    const auto same = build_plan(est({1, 2}, {0.5, 0.5}), est({1, 2}, {0.5, 0.5}), 1, 1.0, 0.5);
    CHECK(analytic_df(DiscretePmf({1, 2}, {0.3, 0.7}), same) == DiscretePmf({1, 2}, {0.3, 0.7}));

    const auto two = build_plan(est({1, 2}, {0.5, 0.5}), est({1, 2}, {0.75, 0.25}), 1, 1.5, 0.5);
    const auto df = analytic_df(u, two);
    CHECK(df == DiscretePmf({1, 2}, {0.75, 0.25}));
    CHECK(l1_distance(df, DiscretePmf({1, 2}, {0.75, 0.25})).l1 == 0.0);

    CHECK_THROWS_AS(analytic_df(DiscretePmf({1, 2}, {0.0, 1.0}), build_plan(est({1, 2}, {0.5, 0.5}),
                                                                                  est({1, 2}, {1.0, 0.0}), 1, 1.0, 0.5)),
                    std::invalid_argument);
}

TEST_CASE("injected exact estimates reproduce the target") {
    Rng rng = make_rng(2);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + rng() % 12;
        const auto s = ref::random_dyadic_pmf(rng, n);
        const auto t = ref::random_dyadic_pmf(rng, n);
        const std::vector<Point> support(s.support().begin(), s.support().end());
        const auto plan = build_plan(EmpiricalEstimate::from_pmf(s, support), EmpiricalEstimate::from_pmf(t, support),
                                     1, weight_ratio(s, t).w(), 0.5);
        CHECK(l1_distance(analytic_df(s, plan), t).l1 == 0.0);
        CHECK(unnormalized_deviation(s, t, plan) <= 1e-15);
    }
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + rng() % 12;
        const auto s = ref::random_pmf(rng, n);
        const auto t = ref::random_pmf(rng, n);
        const std::vector<Point> support(s.support().begin(), s.support().end());
        const auto plan = build_plan(EmpiricalEstimate::from_pmf(s, support), EmpiricalEstimate::from_pmf(t, support),
                                     1, weight_ratio(s, t).w(), 0.5);
        CHECK(l1_distance(analytic_df(s, plan), t).l1 <= 1e-15);
    }
}

TEST_CASE("exact-estimate acceptance probability is 1/max ratio, at least 1/w") {
    Rng rng = make_rng(10);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 1 + rng() % 10;
        const auto s = ref::random_pmf(rng, n);
        const auto t = ref::random_pmf(rng, n, 0.3);
        const std::vector<Point> support(s.support().begin(), s.support().end());
        const double w = weight_ratio(s, t).w();
        const auto plan = build_plan(EmpiricalEstimate::from_pmf(s, support), EmpiricalEstimate::from_pmf(t, support),
                                     1, w, 0.5);
        double accept = 0.0;
        for (std::size_t j = 0; j < n; ++j) accept += s.mass()[j] * plan.acceptance[j];
        CHECK(accept == doctest::Approx(1.0 / plan.max_ratio).epsilon(1e-12));
        CHECK(accept >= 1.0 / w - 1e-12);
    }
}

TEST_CASE("kept count falls short of m2' in at most delta/4 of 500 trials") {
    const double w = weight_ratio(kUniform8, kSkewed8).w();
    CHECK(w == 2.0);
    const std::vector<Point> support(kUniform8.support().begin(), kUniform8.support().end());
    const double delta = 0.2;
    const auto plan = build_plan(EmpiricalEstimate::from_pmf(kUniform8, support),
                                 EmpiricalEstimate::from_pmf(kSkewed8, support), 40, w, delta);
    const int trials = 500;
    int short_runs = 0;
    for (int t = 0; t < trials; ++t) {
        auto src = SampleOracle::labeled(kUniform8, Hypothesis{}, derive_seed(31, t));
        Rng rng = make_rng(derive_seed(32, t));
        short_runs += rejection_sample(src, plan, rng).shortfall;
    }
    const double nominal = delta / 4.0;
    CHECK(static_cast<double>(short_runs) / trials <= nominal + 3.0 * std::sqrt(nominal * (1 - nominal) / trials));
}

TEST_CASE("acceptance floor check uses the observed-rate sigma") {
    CHECK(acceptance_rate_above_floor(1.0, 100, 1.0));
    CHECK(acceptance_rate_above_floor(0.24, 10000, 0.25));
    CHECK_FALSE(acceptance_rate_above_floor(0.2, 10000, 0.25));
    CHECK_FALSE(acceptance_rate_above_floor(0.5, 0, 0.25));
}

TEST_CASE("pipeline") {
    const auto hc = HypothesisClass::intervals(8);
    const auto c = Hypothesis::interval(3, 6);
    Rng rng = make_rng(77);

    SUBCASE("shifted pair") {
        const auto r = run_da_pipeline(kUniform8, kSkewed8, c, hc, 0.3, 0.25, rng);
        CHECK(r.w == 2.0);
        CHECK(r.n == 8);
        CHECK(r.m1 == chernoff_sample_size(8, 2.0, 0.075, 0.125));
        CHECK(r.m2_prime == pac_sample_size(hc.size(), 0.15, 0.125));
        CHECK(r.m2_budget == rejection_budget(r.m2_prime, 2.0, 0.25));
        CHECK(r.accepted_count <= r.drawn_count);
        CHECK(r.acceptance_floor == 0.25);
        CHECK(r.claim1_holds);
        CHECK(r.target_error == exact_error(r.hypothesis, c, kSkewed8));
        CHECK_FALSE(r.truncated);
    }
    SUBCASE("injected estimates make D_f the target") {
        const auto r = run_da_pipeline(kUniform8, kSkewed8, c, hc, 0.3, 0.25, rng, {.inject_exact = true});
        CHECK(r.d_df_target == 0.0);
        CHECK(r.m1 == 0);
    }
    SUBCASE("weight ratio violation") {
        CHECK_THROWS_AS(run_da_pipeline(DiscretePmf::uniform(1, 4), kUniform8, c, hc, 0.3, 0.25, rng),
                        WeightRatioViolation);
    }
    SUBCASE("same seed, same report") {
        Rng a = make_rng(5), b = make_rng(5);
        const auto ra = run_da_pipeline(kUniform8, kSkewed8, c, hc, 0.3, 0.25, a, {.thinning = ThinningMode::Binomial});
        const auto rb = run_da_pipeline(kUniform8, kSkewed8, c, hc, 0.3, 0.25, b, {.thinning = ThinningMode::Binomial});
        CHECK(ra.hypothesis == rb.hypothesis);
        CHECK(ra.accepted_count == rb.accepted_count);
        CHECK(ra.df_analytic == rb.df_analytic);
    }
    SUBCASE("wide support is cut to the Chebyshev window") {
        const auto wide = DiscretePmf::binomial(40, 0.5);  // std dev sqrt(10)
        const auto r = run_da_pipeline(wide, wide, Hypothesis::interval(18, 22), HypothesisClass::intervals(40), 0.5,
                                       0.25, rng, {.s_bound = 3.2});
        CHECK(r.truncated);
        CHECK(r.n < 41);
        CHECK(r.dropped_source <= 0.25);
        CHECK(r.dropped_target <= 0.25);
    }
}

}  // TEST_SUITE
