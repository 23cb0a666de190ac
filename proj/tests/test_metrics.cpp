#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "metrics.hpp"
#include "rng.hpp"

using namespace didrf;

TEST_CASE("ndcg of the ideal ranking is exactly 1") {
    const ExaminationModel exam{5};
    const std::vector<double> rel = {0.9, 0.7, 0.7, 0.2, 0.05};
    const std::vector<std::int32_t> ideal = {0, 1, 2, 3, 4};
    for (int k = 1; k <= 5; ++k) CHECK(ndcg_at_k(ideal, rel, exam, k) == 1.0);
}

TEST_CASE("ndcg of a reversed two-item list") {
    // (0.5*1 + 1*q) / (1*1 + 0.5*q) with q = 1/log2(3), evaluated directly.
    const ExaminationModel exam{5};
    const std::vector<double> rel = {1.0, 0.5};
    const std::vector<std::int32_t> reversed = {1, 0};
    const double q = 1.0 / std::log2(3.0);
    const double expected = (0.5 + q) / (1.0 + 0.5 * q);
    CHECK(expected == doctest::Approx(0.8597186998521972).epsilon(1e-12));
    CHECK(ndcg_at_k(reversed, rel, exam, 2) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("ndcg edge cases") {
    const ExaminationModel exam{5};
    SUBCASE("single relevant item at rank 1 with k=1") {
        const std::vector<double> rel = {0.8, 0.0};
        const std::vector<std::int32_t> list = {0, 1};
        CHECK(ndcg_at_k(list, rel, exam, 1) == 1.0);
    }
    SUBCASE("all-zero relevance defines ndcg = 1") {
        const std::vector<double> rel = {0.0, 0.0, 0.0};
        const std::vector<std::int32_t> list = {2, 0, 1};
        CHECK(ndcg_at_k(list, rel, exam, 3) == 1.0);
    }
    SUBCASE("permuting equally relevant items changes nothing") {
        const std::vector<double> rel = {0.5, 0.5, 0.9, 0.5};
        const std::vector<std::int32_t> a = {2, 0, 1, 3};
        const std::vector<std::int32_t> b = {2, 3, 0, 1};
        for (int k = 1; k <= 4; ++k)
            CHECK(ndcg_at_k(a, rel, exam, k) == ndcg_at_k(b, rel, exam, k));
    }
}

TEST_CASE("pairwise unfairness on hand-enumerated instances") {
    SUBCASE("proportional incomes are perfectly fair") {
        const std::vector<double> rel = {0.9, 0.3, 0.6};
        std::vector<double> income(3);
        for (std::size_t i = 0; i < 3; ++i) income[i] = 2.5 * rel[i];
        CHECK(pairwise_unfairness(income, rel) < 1e-24);
    }
    SUBCASE("two equal items with all income on one") {
        const std::vector<double> rel = {1.0, 1.0};
        const std::vector<double> income = {1.0, 0.0};
        CHECK(pairwise_unfairness(income, rel) == 1.0);
    }
    SUBCASE("zero income is degenerate-fair") {
        const std::vector<double> rel = {1.0, 0.4};
        const std::vector<double> income = {0.0, 0.0};
        CHECK(pairwise_unfairness(income, rel) == 0.0);
    }
}

TEST_CASE("unfairness is non-negative, relabel-symmetric and scales quadratically") {
    Rng rng(55);
    for (int instance = 0; instance < 100; ++instance) {
        const std::size_t n = 2 + rng.next_below(7);
        std::vector<double> rel(n), income(n);
        for (std::size_t i = 0; i < n; ++i) {
            rel[i] = rng.next_double();
            income[i] = 3.0 * rng.next_double();
        }
        const double base = pairwise_unfairness(income, rel);
        CHECK(base >= 0.0);

        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        std::vector<double> rel_p(n), income_p(n);
        for (std::size_t i = 0; i < n; ++i) {
            rel_p[i] = rel[perm[i]];
            income_p[i] = income[perm[i]];
        }
        CHECK(pairwise_unfairness(income_p, rel_p) ==
              doctest::Approx(base).epsilon(1e-12));

        const double c = 0.5 + 4.0 * rng.next_double();
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = c * income[i];
        if (base > 0.0)
            CHECK(pairwise_unfairness(scaled, rel) ==
                  doctest::Approx(c * c * base).epsilon(1e-12));
    }
}

TEST_CASE("income and exposure unfairness read their own ledger columns") {
    const std::vector<double> rel = {1.0, 1.0};
    std::vector<ItemLedger> ledgers(2);
    ledgers[0].exposure = 1.0;
    ledgers[0].income = 1.0;
    CHECK(exposure_unfairness(ledgers, rel) == 1.0);
    CHECK(income_unfairness(ledgers, rel) == 1.0);
    ledgers[0].income = 0.5;
    CHECK(income_unfairness(ledgers, rel) == 0.25);
    CHECK(exposure_unfairness(ledgers, rel) == 1.0);
}

TEST_CASE("cndcg accumulator is a discount-weighted running mean") {
    const ExaminationModel exam{5};
    const std::vector<double> rel = {0.9, 0.5, 0.2};
    const auto ideal = ideal_prefix_gains(rel, exam, 3);

    SUBCASE("single session reports its own ndcg") {
        CndcgAccumulator acc(0.995);
        const std::vector<std::int32_t> list = {1, 0, 2};
        acc.add_session(list, rel, exam, ideal);
        CHECK(acc.cndcg_avg(2) ==
              doctest::Approx(ndcg_at_k(list, rel, exam, 2)).epsilon(1e-15));
    }

    SUBCASE("all-perfect sessions report exactly 1 at any horizon") {
        CndcgAccumulator acc(0.995);
        const std::vector<std::int32_t> ideal_list = {0, 1, 2};
        for (int s = 0; s < 2000; ++s) acc.add_session(ideal_list, rel, exam, ideal);
        CHECK(acc.cndcg_avg(1) == 1.0);
        CHECK(acc.cndcg_avg(3) == 1.0);
    }

    SUBCASE("incremental recurrence equals the direct weighted sum") {
        const double alpha = 0.9;
        CndcgAccumulator acc(alpha);
        Rng rng(13);
        std::vector<std::int32_t> list = {0, 1, 2};
        std::vector<double> session_ndcg;
        for (int s = 0; s < 40; ++s) {
            rng.shuffle(list);
            acc.add_session(list, rel, exam, ideal);
            session_ndcg.push_back(ndcg_at_k(list, rel, exam, 3));
        }
        double num = 0.0, den = 0.0;
        const auto n = static_cast<long>(session_ndcg.size());
        for (long tau = 1; tau <= n; ++tau) {
            const double w = std::pow(alpha, static_cast<double>(n - tau));
            num += w * session_ndcg[static_cast<std::size_t>(tau - 1)];
            den += w;
        }
        CHECK(acc.cndcg_avg(3) == doctest::Approx(num / den).epsilon(1e-12));
    }

    SUBCASE("recent sessions dominate the average") {
        CndcgAccumulator acc(0.5);
        const std::vector<std::int32_t> worst = {2, 1, 0};
        const std::vector<std::int32_t> best = {0, 1, 2};
        for (int s = 0; s < 50; ++s) acc.add_session(worst, rel, exam, ideal);
        for (int s = 0; s < 50; ++s) acc.add_session(best, rel, exam, ideal);
        CHECK(acc.cndcg_avg(3) > 0.99);
    }
}
