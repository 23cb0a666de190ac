#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "metrics.hpp"
#include "rankers.hpp"
#include "rng.hpp"

using namespace didrf;

namespace {

std::vector<ItemLedger> ledgers_with_income(const std::vector<double>& income) {
    std::vector<ItemLedger> out(income.size());
    for (std::size_t i = 0; i < income.size(); ++i) out[i].income = income[i];
    return out;
}

// Largest surrogate objective sum_j p_j s(pi[j]) over all ordered
// k-arrangements, by exhaustive enumeration.
double best_surrogate_value(const std::vector<double>& totals, int k,
                            const ExaminationModel& exam) {
    std::vector<std::size_t> idx(totals.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end());
    double best = -1e300;
    std::vector<bool> used(totals.size(), false);
    std::vector<std::size_t> current(static_cast<std::size_t>(k));
    auto recurse = [&](auto&& self, int depth, double acc) -> void {
        if (depth == k) {
            best = std::max(best, acc);
            return;
        }
        for (std::size_t d = 0; d < totals.size(); ++d) {
            if (used[d]) continue;
            used[d] = true;
            self(self, depth + 1, acc + exam.prob(depth + 1) * totals[d]);
            used[d] = false;
        }
    };
    recurse(recurse, 0, 0.0);
    return best;
}

}  // namespace

TEST_CASE("sigma coefficient") {
    CHECK(sigma_coefficient(2) == 2.0);
    CHECK(sigma_coefficient(3) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(sigma_coefficient(20) == doctest::Approx(4.0 / 380.0).epsilon(1e-15));
    CHECK_THROWS_AS(sigma_coefficient(1), std::domain_error);
}

TEST_CASE("fairness gradient on hand-evaluated instances") {
    const std::vector<double> rel = {1.0, 0.5};

    SUBCASE("worked example") {
        const auto ledgers = ledgers_with_income({0.2, 0.4});
        CHECK(fairness_grad_g(0, rel, ledgers) == doctest::Approx(0.3).epsilon(1e-12));
    }
    SUBCASE("zero income means zero gradient everywhere") {
        const auto ledgers = ledgers_with_income({0.0, 0.0});
        CHECK(fairness_grad_g(0, rel, ledgers) == 0.0);
        CHECK(fairness_grad_g(1, rel, ledgers) == 0.0);
    }
    SUBCASE("income proportional to relevance is a stationary point") {
        const auto ledgers = ledgers_with_income({3.0 * 1.0, 3.0 * 0.5});
        CHECK(std::abs(fairness_grad_g(0, rel, ledgers)) < 1e-12);
        CHECK(std::abs(fairness_grad_g(1, rel, ledgers)) < 1e-12);
    }
}

TEST_CASE("fairness gradient matches central finite differences of the metric") {
    Rng rng(42);
    for (int instance = 0; instance < 100; ++instance) {
        const std::size_t n = 3 + rng.next_below(5);
        std::vector<double> rel(n), income(n);
        for (std::size_t i = 0; i < n; ++i) {
            rel[i] = 0.1 + 0.9 * rng.next_double();
            income[i] = 2.0 * rng.next_double();
        }
        const auto ledgers = ledgers_with_income(income);
        const std::size_t d = rng.next_below(n);
        const double analytic = fairness_grad_g(d, rel, ledgers);

        const double delta = 1e-4 * (1.0 + std::abs(income[d]));
        std::vector<double> plus = income, minus = income;
        plus[d] += delta;
        minus[d] -= delta;
        const double numeric = (-pairwise_unfairness(plus, rel) -
                                -pairwise_unfairness(minus, rel)) /
                               (2.0 * delta);
        const double scale = std::max({1e-12, std::abs(analytic), std::abs(numeric)});
        CHECK(std::abs(analytic - numeric) / scale < 1e-5);
    }
}

TEST_CASE("fairness curvature term h") {
    const std::vector<double> rel = {1.0, 0.5};
    CHECK(fairness_hess_h(0, rel, 0.5) == -0.125);  // -2 * 0.25 * 0.25
    CHECK(fairness_hess_h(0, rel, 0.0) == 0.0);
    const std::vector<double> lonely = {0.7, 0.0, 0.0};
    CHECK(fairness_hess_h(0, lonely, 0.9) == 0.0);

    Rng rng(3);
    for (int instance = 0; instance < 50; ++instance) {
        const std::size_t n = 2 + rng.next_below(6);
        std::vector<double> r(n);
        for (auto& v : r) v = rng.next_double();
        const double f = 2.0 * rng.next_double();
        CHECK(fairness_hess_h(rng.next_below(n), r, f) <= 0.0);
    }
}

TEST_CASE("linear surrogate bounds the quadratic self-impact term") {
    // h * dE^2 >= h * dE for dE in [0,1]; equality at the endpoints.
    Rng rng(8);
    for (int instance = 0; instance < 200; ++instance) {
        const double h = -5.0 * rng.next_double();
        const double de = rng.next_double();
        CHECK(h * de * de >= h * de);
    }
    const double h = -3.7;
    CHECK(h * 0.0 * 0.0 == h * 0.0);
    CHECK(h * 1.0 * 1.0 == h * 1.0);
}

TEST_CASE("exact Taylor expansion of the fairness delta") {
    Rng rng(17);
    for (int instance = 0; instance < 100; ++instance) {
        const std::size_t n = 5;
        std::vector<double> rel(n), income(n), delta(n), after(n);
        for (std::size_t i = 0; i < n; ++i) {
            rel[i] = 0.1 + 0.9 * rng.next_double();
            income[i] = 2.0 * rng.next_double();
            delta[i] = rng.next_double();
            after[i] = income[i] + delta[i];
        }
        const double direct = -pairwise_unfairness(after, rel) - -pairwise_unfairness(income, rel);
        const double expanded = fairness_delta_taylor(rel, income, delta);
        const double scale = std::max(1e-30, std::abs(direct));
        CHECK(std::abs(expanded - direct) / scale < 1e-9);
    }
}

TEST_CASE("score decomposition per policy") {
    const std::vector<double> rel = {1.0, 0.5};
    const auto ledgers = ledgers_with_income({0.2, 0.4});
    const EstimatorPriors priors{};
    const std::vector<double> rate = {0.5, 0.5};

    SUBCASE("offline DIDRF composes R + gamma*(g + h/2)") {
        PolicyConfig cfg{Policy::DIDRF, 1.0, 0.0, 2, Mode::Offline};
        const auto ctx = make_score_context(rel, ledgers, 1);
        const ScoreBreakdown s = score_item(cfg, ctx, rel[0], ledgers[0], rate[0], priors);
        CHECK(s.total == doctest::Approx(1.2375).epsilon(1e-12));
        CHECK(s.phi == doctest::Approx(s.g + 0.5 * s.h).epsilon(1e-15));
    }

    SUBCASE("gamma=0 collapses every DIDRF variant to the raw relevance") {
        for (Policy p : {Policy::DIDRF, Policy::DIDRF_WO_h, Policy::DIDRF_WO_p, Policy::MCFair}) {
            PolicyConfig cfg{p, 0.0, 0.0, 2, Mode::Offline};
            const auto ctx = make_score_context(rel, ledgers, 1);
            const ScoreBreakdown s = score_item(cfg, ctx, rel[0], ledgers[0], rate[0], priors);
            CHECK(s.total == rel[0]);
        }
    }

    SUBCASE("online uncertainty term vanishes at unit prior-adjusted exposure") {
        PolicyConfig cfg{Policy::DIDRF, 0.0, 1.0, 2, Mode::Online};
        const auto ctx = make_score_context(rel, ledgers, 1);
        ItemLedger fresh;  // exposure 0 + prior 1 -> E^ = 1
        const ScoreBreakdown s = score_item(cfg, ctx, 0.37, fresh, rate[0], priors);
        CHECK(s.u == 0.0);
        CHECK(s.total == 0.37);
    }

    SUBCASE("ablations zero out exactly their advertised terms") {
        const auto ctx = make_score_context(rel, ledgers, 1);
        ItemLedger l;
        l.exposure = 1.0;  // E^ = 2
        PolicyConfig wo_h{Policy::DIDRF_WO_h, 2.0, 3.0, 2, Mode::Online};
        const ScoreBreakdown a = score_item(wo_h, ctx, 0.6, l, 0.5, priors);
        CHECK(a.h == 0.0);
        CHECK(a.u == uncertainty_gain_at(2.0));

        PolicyConfig wo_p{Policy::DIDRF_WO_p, 2.0, 3.0, 2, Mode::Online};
        const ScoreBreakdown b = score_item(wo_p, ctx, 0.6, l, 0.5, priors);
        CHECK(b.h != 0.0);
        CHECK(b.u == -0.25);  // first-order part only

        PolicyConfig mcfair{Policy::MCFair, 2.0, 3.0, 2, Mode::Online};
        const ScoreBreakdown c = score_item(mcfair, ctx, 0.6, l, 0.5, priors);
        CHECK(c.h == 0.0);
        CHECK(c.u == -0.25);
    }

    SUBCASE("FairK scores by the fairness increment alone") {
        PolicyConfig cfg{Policy::FairK, 0.0, 0.0, 2, Mode::Offline};
        const auto ctx = make_score_context(rel, ledgers, 1);
        const ScoreBreakdown s = score_item(cfg, ctx, rel[0], ledgers[0], rate[0], priors);
        CHECK(s.total == s.phi);
        CHECK(s.total == doctest::Approx(0.3 - 0.0625).epsilon(1e-12));
    }

    SUBCASE("FairCo correction is zero at the first session and non-negative after") {
        PolicyConfig cfg{Policy::FairCo, 10.0, 0.0, 2, Mode::Offline};
        const auto ctx1 = make_score_context(rel, ledgers, 1);
        const ScoreBreakdown first = score_item(cfg, ctx1, rel[0], ledgers[0], rate[0], priors);
        CHECK(first.total == rel[0]);
        const auto ctx2 = make_score_context(rel, ledgers, 50);
        const ScoreBreakdown later0 = score_item(cfg, ctx2, rel[0], ledgers[0], rate[0], priors);
        const ScoreBreakdown later1 = score_item(cfg, ctx2, rel[1], ledgers[1], rate[1], priors);
        CHECK(later0.total >= rel[0]);
        // item 1 holds the worst income/relevance ratio, so its correction is 0
        CHECK(later1.total == rel[1]);
    }
}

TEST_CASE("with unit income rate, scores on income coincide with scores on exposure") {
    // When every session pays f = 1, the income and exposure columns stay
    // bitwise equal, so rescoring with income overwritten by exposure must
    // reproduce the exact same breakdowns.
    Rng rng(61);
    const std::size_t n = 12;
    std::vector<double> rel(n);
    for (auto& r : rel) r = 0.1 + 0.9 * rng.next_double();
    std::vector<ItemLedger> ledgers(n);
    const ExaminationModel exam{5};
    const std::vector<double> rate(n, 1.0);
    std::vector<std::int32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<std::uint8_t> clicks;
    for (int session = 0; session < 200; ++session) {
        rng.shuffle(ids);
        std::vector<std::int32_t> shown(ids.begin(), ids.begin() + 5);
        simulate_session(shown, rel, exam, rng, clicks);
        apply_session(ledgers, shown, clicks, rate, exam);
    }

    std::vector<ItemLedger> exposure_as_income = ledgers;
    for (auto& l : exposure_as_income) l.income = l.exposure;

    PolicyConfig cfg{Policy::DIDRF, 7.0, 0.0, 5, Mode::Offline};
    std::vector<ScoreBreakdown> a, b;
    score_all(cfg, rel, ledgers, rate, 201, EstimatorPriors{}, nullptr, a);
    score_all(cfg, rel, exposure_as_income, rate, 201, EstimatorPriors{}, nullptr, b);
    for (std::size_t d = 0; d < n; ++d) {
        CHECK(a[d].total == b[d].total);
        CHECK(a[d].g == b[d].g);
    }
}

TEST_CASE("rank_by_score sorts by total and breaks ties with the seeded permutation") {
    std::vector<ScoreBreakdown> scores(3);
    scores[0].total = 3.0;
    scores[1].total = 1.0;
    scores[2].total = 2.0;
    Rng tie(1);
    std::vector<std::int32_t> out;
    rank_by_score(scores, 2, tie, out);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == 0);
    CHECK(out[1] == 2);
}

TEST_CASE("tie-breaking is seed-deterministic and seed-sensitive") {
    std::vector<ScoreBreakdown> scores(8);
    for (auto& s : scores) s.total = 1.0;

    std::vector<std::int32_t> a, b;
    Rng tie_a(5), tie_b(5);
    rank_by_score(scores, 8, tie_a, a);
    rank_by_score(scores, 8, tie_b, b);
    CHECK(a == b);

    bool any_different = false;
    for (std::uint64_t seed = 6; seed < 12; ++seed) {
        Rng tie_c(seed);
        std::vector<std::int32_t> c;
        rank_by_score(scores, 8, tie_c, c);
        any_different = any_different || c != a;
    }
    CHECK(any_different);
}

TEST_CASE("adding a constant to every total leaves the ranking unchanged") {
    Rng rng(23);
    for (int instance = 0; instance < 50; ++instance) {
        const std::size_t n = 4 + rng.next_below(5);
        std::vector<ScoreBreakdown> scores(n), shifted(n);
        const double c = 10.0 * (rng.next_double() - 0.5);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i].total = rng.next_double();
            shifted[i].total = scores[i].total + c;
        }
        const std::uint64_t seed = rng.next_u64();
        Rng tie_a(seed), tie_b(seed);
        std::vector<std::int32_t> a, b;
        rank_by_score(scores, 3, tie_a, a);
        rank_by_score(shifted, 3, tie_b, b);
        CHECK(a == b);
    }
}

TEST_CASE("ranking attains the enumerated maximum of the surrogate objective") {
    const ExaminationModel exam{5};
    Rng rng(99);
    for (int instance = 0; instance < 30; ++instance) {
        const std::size_t n = 6;
        const int k = 3;
        std::vector<ScoreBreakdown> scores(n);
        std::vector<double> totals(n);
        for (std::size_t i = 0; i < n; ++i) {
            totals[i] = 3.0 * (rng.next_double() - 0.25);
            scores[i].total = totals[i];
        }
        Rng tie(rng.next_u64());
        std::vector<std::int32_t> ranked;
        rank_by_score(scores, k, tie, ranked);
        double achieved = 0.0;
        for (int j = 0; j < k; ++j)
            achieved += exam.prob(j + 1) * totals[static_cast<std::size_t>(ranked[static_cast<std::size_t>(j)])];
        CHECK(achieved == doctest::Approx(best_surrogate_value(totals, k, exam)).epsilon(1e-12));
    }
}

TEST_CASE("brute-force oracle basics") {
    const ExaminationModel exam{5};

    SUBCASE("gamma=0 returns the relevance-descending prefix") {
        const std::vector<double> rel = {0.2, 0.9, 0.5, 0.7};
        const auto ledgers = ledgers_with_income({0.0, 0.0, 0.0, 0.0});
        const auto best = brute_force_best(rel, ledgers, 1.0, 0.0, 3, exam);
        REQUIRE(best.size() == 3);
        CHECK(best[0] == 1);
        CHECK(best[1] == 3);
        CHECK(best[2] == 2);
    }

    SUBCASE("k=1 two-arrangement cross-check") {
        const std::vector<double> rel = {0.9, 0.6};
        const auto ledgers = ledgers_with_income({1.4, 0.1});
        const double f_t = 0.8;
        const double gamma = 2.0;
        const auto best = brute_force_best(rel, ledgers, f_t, gamma, 1, exam);
        double values[2];
        for (std::size_t d = 0; d < 2; ++d) {
            std::vector<double> before = {1.4, 0.1};
            std::vector<double> after = before;
            after[d] += exam.prob(1) * f_t;
            values[d] = exam.prob(1) * rel[d] +
                        gamma * (-pairwise_unfairness(after, rel) -
                                 -pairwise_unfairness(before, rel));
        }
        CHECK(best[0] == (values[0] >= values[1] ? 0 : 1));
    }

    SUBCASE("oracle refuses oversized instances") {
        const std::vector<double> rel(9, 0.5);
        const std::vector<ItemLedger> ledgers(9);
        CHECK_THROWS_AS(brute_force_best(rel, ledgers, 1.0, 1.0, 2, exam), std::domain_error);
    }
}
