#include <doctest.h>

#include <cmath>
#include <numeric>

#include "covshift/hypotheses.hpp"
#include "covshift/oracles.hpp"
#include "reference.hpp"

using namespace covshift;

TEST_SUITE("hypotheses") {

TEST_CASE("hypothesis forms") {
    const auto h = Hypothesis::interval(2, 4);
    CHECK_FALSE(h(1));
    CHECK(h(2));
    CHECK(h(4));
    CHECK_FALSE(h(5));
    CHECK_THROWS_AS(Hypothesis::interval(3, 2), std::invalid_argument);
    CHECK_FALSE(Hypothesis::empty_interval()(0));
    CHECK(Hypothesis{} == Hypothesis::empty_interval());
    CHECK(Hypothesis::constant(true)(-1000));

    const auto t = Hypothesis::table({{3, true}, {1, false}});
    CHECK(t(3));
    CHECK_FALSE(t(1));
    CHECK_THROWS_AS((void)t(2), std::out_of_range);
    CHECK_THROWS_AS(Hypothesis::table({{1, true}, {1, false}}), std::invalid_argument);
    CHECK(t.to_string() == "table((1,0),(3,1))");
    CHECK(h.to_string() == "interval(2,4)");
}

TEST_CASE("interval class enumeration") {
    for (int n = 1; n <= 12; ++n)
        CHECK(HypothesisClass::intervals(n).size() == static_cast<std::size_t>(n * (n + 1) / 2 + 1));
    const auto c = HypothesisClass::intervals(3);
    CHECK(c.members()[0] == Hypothesis::interval(1, 1));
    CHECK(c.members()[1] == Hypothesis::interval(1, 2));
    CHECK(c.members()[3] == Hypothesis::interval(2, 2));
    CHECK(c.members().back().is_empty_interval());
    CHECK(c.descriptor() == "intervals(3)");

    const Point pts[] = {1, 2, 3};
    CHECK(HypothesisClass::all_tables(pts).size() == 8);
}

TEST_CASE("exact error examples") {
    const auto u = DiscretePmf::uniform(1, 4);
    const auto c = Hypothesis::interval(1, 2);
    CHECK(exact_error(c, c, u) == 0.0);
    CHECK(exact_error(Hypothesis::interval(3, 4), c, u) == 1.0);
    CHECK(exact_error(Hypothesis::interval(1, 1), c, u) == doctest::Approx(0.25));
}

TEST_CASE("discrepancy examples") {
    const DiscretePmf p({1, 2}, {0.5, 0.5});
    const DiscretePmf q({1, 2}, {0.9, 0.1});
    const auto c = Hypothesis::interval(2, 2);
    const auto hc = HypothesisClass::lookup_tables({Hypothesis::constant(false), Hypothesis::constant(true)});
    CHECK(discrepancy(p, q, hc, c) == doctest::Approx(0.4));
    CHECK(discrepancy(p, p, hc, c) == 0.0);
    CHECK(discrepancy(p, q, hc, c) <= 2.0 * l1_distance(p, q).l1);

    const auto single = HypothesisClass::lookup_tables({Hypothesis::interval(1, 1)});
    CHECK(discrepancy(p, q, single, c) ==
          doctest::Approx(std::abs(exact_error(Hypothesis::interval(1, 1), c, p) -
                                   exact_error(Hypothesis::interval(1, 1), c, q))));
}

TEST_CASE("discrepancy is at most 2 M d on random instances") {
    Rng rng = make_rng(77);
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = 1 + rng() % 10;
        const auto p = ref::random_pmf(rng, n, 0.2);
        const auto q = ref::random_pmf(rng, n, 0.2);
        std::vector<Point> support(n);
        std::iota(support.begin(), support.end(), Point{1});
        std::vector<Hypothesis> members;
        for (std::size_t k = 0, m = 1 + rng() % 50; k < m; ++k) members.push_back(ref::random_table(rng, support));
        const auto c = ref::random_table(rng, support);
        const LossSpec loss{0.5 + 1.5 * uniform01(rng)};
        const auto hc = HypothesisClass::lookup_tables(std::move(members));
        CHECK(discrepancy(p, q, hc, c, loss) <= 2.0 * loss.bound * l1_distance(p, q).l1 + 1e-12);
    }
}

TEST_CASE("ERM picks the first consistent interval") {
    // Positives {2,3}, negatives {1,5}: consistent intervals are [2,3] and [2,4];
    // (a,b) order puts [2,3] first.
    const std::vector<LabeledPoint> s = {{1, false}, {2, true}, {3, true}, {5, false}};
    const auto hc = HypothesisClass::intervals(5);
    CHECK(hc.size() == 16);
    const auto r = erm_select(s, hc);
    CHECK(r.mistakes == 0);
    CHECK(hc.members()[r.index] == Hypothesis::interval(2, 3));

    // Exhaustive oracle: the first zero-mistake member.
    std::size_t first = hc.size();
    for (std::size_t i = 0; i < hc.size() && first == hc.size(); ++i) {
        bool ok = true;
        for (const auto& e : s) ok = ok && hc.members()[i](e.point) == e.label;
        if (ok) first = i;
    }
    CHECK(r.index == first);

    CHECK(erm_learn({}, hc) == hc.members()[0]);
}

TEST_CASE("ERM with contradictory labels minimizes mistakes") {
    const std::vector<LabeledPoint> s = {{2, true}, {2, false}, {2, true}, {4, false}};
    const auto hc = HypothesisClass::intervals(5);
    const auto r = erm_select(s, hc);
    std::size_t best = s.size();
    for (const auto& h : hc.members()) {
        std::size_t m = 0;
        for (const auto& e : s) m += h(e.point) != e.label;
        best = std::min(best, m);
    }
    CHECK(r.mistakes == best);
    CHECK(r.mistakes == 1);
    CHECK(erm_learn(s, hc) == erm_learn(s, hc));
}

TEST_CASE("PAC sample size") {
    CHECK(pac_sample_size(1, 0.5, 0.5) == 2);
    CHECK(pac_sample_size(16, 0.1, 0.1) == 51);
    CHECK_THROWS_AS(pac_sample_size(16, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(pac_sample_size(16, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pac_sample_size(0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("ERM meets the PAC guarantee on 500 trials") {
    const auto hc = HypothesisClass::intervals(10);
    const auto p = DiscretePmf::binomial(9, 0.4);  // support {0..9}; 0 lies outside every interval
    const auto c = Hypothesis::interval(3, 6);
    const double eps = 0.1, delta = 0.1;
    const auto m = pac_sample_size(hc.size(), eps, delta);
    int failures = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        auto oracle = SampleOracle::labeled(p, c, derive_seed(404, t));
        std::vector<LabeledPoint> s;
        for (std::uint64_t i = 0; i < m; ++i) s.push_back(oracle.draw_labeled());
        const auto h = erm_learn(s, hc);
        failures += exact_error(h, c, p) > eps;
    }
    const double slack = 3.0 * std::sqrt(delta * (1.0 - delta) / trials);
    CHECK(static_cast<double>(failures) / trials <= delta + slack);
}

TEST_CASE("error transfer bound through the weight ratio") {
    const DiscretePmf s({1, 2}, {0.5, 0.5});
    const DiscretePmf t({1, 2}, {0.75, 0.25});
    const auto r = check_theorem1_bound(Hypothesis::constant(false), Hypothesis::interval(1, 1), s, t);
    CHECK(r.holds);
    CHECK(r.lhs == doctest::Approx(0.75));
    CHECK(r.rhs == doctest::Approx(0.75));

    const auto same = check_theorem1_bound(Hypothesis::interval(1, 1), Hypothesis::interval(2, 2), s, s);
    CHECK(same.holds);
    CHECK(same.lhs == same.rhs);

    CHECK_THROWS_AS(check_theorem1_bound(Hypothesis{}, Hypothesis{}, DiscretePmf::point_mass(1),
                                         DiscretePmf::uniform(1, 2)),
                    WeightRatioViolation);
}

TEST_CASE("additive transfer bound through the l1 distance") {
    const DiscretePmf p({1, 2}, {0.5, 0.5});
    const DiscretePmf q({1, 2}, {0.9, 0.1});
    const auto r = check_prop2_bound(Hypothesis::constant(false), Hypothesis::interval(2, 2), p, q);
    CHECK(r.holds);
    CHECK(r.lhs == doctest::Approx(0.1));
    CHECK(r.rhs == doctest::Approx(1.3));
    const auto same = check_prop2_bound(Hypothesis::constant(true), Hypothesis::interval(2, 2), p, p);
    CHECK(same.holds);
    CHECK(same.lhs == same.rhs);
}

TEST_CASE("both transfer bounds agree with an independent rational evaluation") {
    Rng rng = make_rng(1234);
    for (int i = 0; i < 400; ++i) {
        const std::size_t n = 1 + rng() % 9;
        std::vector<Point> support(n);
        std::iota(support.begin(), support.end(), Point{1});
        const auto s = ref::random_pmf(rng, n);
        const auto t = ref::random_pmf(rng, n, 0.3);
        const auto h = ref::random_table(rng, support);
        const auto c = ref::random_table(rng, support);

        const auto es = ref::exact_error_q(h, c, s);
        const auto et = ref::exact_error_q(h, c, t);
        ref::Rational ratio(-1);
        ref::Rational gap(0);
        for (Point x : support) {
            const auto sx = ref::exact(s(x)), tx = ref::exact(t(x));
            gap += sx > tx ? sx - tx : tx - sx;
            if (tx > 0 && (ratio < 0 || sx / tx < ratio)) ratio = sx / tx;
        }
        CHECK(check_theorem1_bound(h, c, s, t).holds == (et * ratio <= es));
        CHECK(check_theorem1_bound(h, c, s, t).holds);
        CHECK(check_prop2_bound(h, c, s, t).holds == (et <= es + gap));
        CHECK(check_prop2_bound(h, c, s, t).holds);
    }
}

}  // TEST_SUITE
