#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "ledger.hpp"
#include "rng.hpp"

using namespace didrf;

TEST_CASE("apply_session credits exposure, income and clicks by position") {
    const ExaminationModel exam{5};
    std::vector<ItemLedger> ledgers(7);

    SUBCASE("rank 1, unit income rate, clicked") {
        const std::vector<std::int32_t> ranklist = {3};
        const std::vector<std::uint8_t> clicks = {1};
        const std::vector<double> rate(7, 1.0);
        apply_session(ledgers, ranklist, clicks, rate, exam);
        CHECK(ledgers[3].exposure == 1.0);
        CHECK(ledgers[3].income == 1.0);
        CHECK(ledgers[3].clicks == 1.0);
    }

    SUBCASE("rank 3, income rate 0.5, not clicked") {
        const std::vector<std::int32_t> ranklist = {6, 0, 2};
        const std::vector<std::uint8_t> clicks = {0, 0, 0};
        const std::vector<double> rate(7, 0.5);
        apply_session(ledgers, ranklist, clicks, rate, exam);
        CHECK(ledgers[2].exposure == 0.5);  // p_3 = 1/log2(4)
        CHECK(ledgers[2].income == 0.25);
        CHECK(ledgers[2].clicks == 0.0);
    }

    SUBCASE("rank 6 with k_c=5 is never touched") {
        const std::vector<std::int32_t> ranklist = {0, 1, 2, 3, 4, 5};
        const std::vector<std::uint8_t> clicks(6, 1);
        const std::vector<double> rate(7, 1.0);
        apply_session(ledgers, ranklist, clicks, rate, exam);
        CHECK(ledgers[5].exposure == 0.0);
        CHECK(ledgers[5].income == 0.0);
        CHECK(ledgers[5].clicks == 0.0);
    }
}

TEST_CASE("income equals exposure bit-for-bit under a unit income rate") {
    const ExaminationModel exam{5};
    std::vector<ItemLedger> ledgers(10);
    const std::vector<double> rate(10, 1.0);
    Rng rng(9);
    for (int session = 0; session < 300; ++session) {
        std::vector<std::int32_t> ranklist(10);
        for (std::size_t i = 0; i < 10; ++i) ranklist[i] = static_cast<std::int32_t>(i);
        rng.shuffle(ranklist);
        ranklist.resize(5);
        std::vector<std::uint8_t> clicks(5);
        for (auto& c : clicks) c = rng.next_double() < 0.3 ? 1 : 0;
        apply_session(ledgers, ranklist, clicks, rate, exam);
        for (const ItemLedger& l : ledgers) CHECK(l.income == l.exposure);
    }
}

TEST_CASE("ledger replay is independent of batching") {
    // Accumulate increments from a logged run in two different groupings and
    // land on identical ledgers.
    const ExaminationModel exam{3};
    const std::vector<double> rate = {1.0, 0.5, 0.25, 0.125};
    std::vector<ItemLedger> live(4);
    struct Row {
        std::int32_t item;
        double de, di, dc;
    };
    std::vector<Row> log;
    Rng rng(4);
    std::vector<std::int32_t> ids = {0, 1, 2, 3};
    for (int session = 0; session < 100; ++session) {
        rng.shuffle(ids);
        std::vector<std::int32_t> ranklist(ids.begin(), ids.begin() + 3);
        std::vector<std::uint8_t> clicks(3);
        for (auto& c : clicks) c = rng.next_double() < 0.5 ? 1 : 0;
        for (std::size_t j = 0; j < 3; ++j) {
            const double p = exam.prob(static_cast<int>(j) + 1);
            const auto d = static_cast<std::size_t>(ranklist[j]);
            log.push_back(Row{ranklist[j], p, p * rate[d], static_cast<double>(clicks[j])});
        }
        apply_session(live, ranklist, clicks, rate, exam);
    }
    for (std::size_t batch : {std::size_t{1}, std::size_t{7}, log.size()}) {
        std::vector<ItemLedger> replayed(4);
        for (std::size_t start = 0; start < log.size(); start += batch) {
            const std::size_t end = std::min(log.size(), start + batch);
            for (std::size_t i = start; i < end; ++i) {
                auto& l = replayed[static_cast<std::size_t>(log[i].item)];
                l.exposure += log[i].de;
                l.income += log[i].di;
                l.clicks += log[i].dc;
            }
        }
        for (std::size_t d = 0; d < 4; ++d) {
            CHECK(replayed[d].exposure == live[d].exposure);
            CHECK(replayed[d].income == live[d].income);
            CHECK(replayed[d].clicks == live[d].clicks);
        }
    }
}

TEST_CASE("estimate_relevance is the clamped prior-smoothed click rate") {
    CHECK(estimate_relevance(ItemLedger{6.0, 0.0, 3.0}, EstimatorPriors{0.0, 0.0}) == 0.5);
    CHECK(estimate_relevance(ItemLedger{0.0, 0.0, 0.0}, EstimatorPriors{1.0, 0.5}) == 0.5);
    CHECK(estimate_relevance(ItemLedger{5.0, 0.0, 10.0}, EstimatorPriors{0.0, 0.0}) == 1.0);
    CHECK_THROWS_AS(estimate_relevance(ItemLedger{}, EstimatorPriors{0.0, 0.0}),
                    std::domain_error);
}

TEST_CASE("uncertainty gain crosses zero at unit prior-adjusted exposure") {
    CHECK(uncertainty_gain_at(1.0) == 0.0);
    CHECK(uncertainty_gain_at(0.5) == 4.0);     // -4 + 8
    CHECK(uncertainty_gain_at(2.0) == -0.125);  // -1/4 + 1/8
    CHECK_THROWS_AS(uncertainty_gain_at(0.0), std::domain_error);

    for (double e : {0.1, 0.4, 0.75, 0.99}) CHECK(uncertainty_gain_at(e) > 0.0);
    for (double e : {1.01, 2.0, 10.0, 500.0}) CHECK(uncertainty_gain_at(e) < 0.0);

    const ItemLedger ledger{3.0, 0.0, 1.0};
    CHECK(uncertainty_gain(ledger) == uncertainty_gain_at(4.0));
}

TEST_CASE("estimator converges under forced uniform exposure") {
    // Every item shown alone at rank 1 (p = 1): after 10k impressions the
    // clamped estimator should sit within 0.05 of truth essentially always.
    const ExaminationModel exam{1};
    const std::vector<double> rel = {0.05, 0.3, 0.5, 0.85, 1.0};
    std::vector<ItemLedger> ledgers(rel.size());
    Rng rng(11);
    std::vector<std::uint8_t> clicks;
    const long impressions = 10000;
    for (long i = 0; i < impressions; ++i) {
        for (std::int32_t d = 0; d < static_cast<std::int32_t>(rel.size()); ++d) {
            const std::vector<std::int32_t> ranklist = {d};
            simulate_session(ranklist, rel, exam, rng, clicks);
            const std::vector<double> rate(rel.size(), 1.0);
            apply_session(ledgers, ranklist, clicks, rate, exam);
        }
    }
    for (std::size_t d = 0; d < rel.size(); ++d) {
        const double estimate = estimate_relevance(ledgers[d]);
        CHECK(std::abs(estimate - rel[d]) < 0.05);
    }
}
