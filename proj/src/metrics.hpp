#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ledger.hpp"
#include "usermodel.hpp"

namespace didrf {

// Position-weighted NDCG with weights equal to the examination probabilities:
//   sum_{i<=k} R(pi[i]) p_i / sum_{i<=k} R(pi*[i]) p_i
// where pi* orders candidates by descending relevance. A query whose
// candidates all have zero relevance scores 1 (0/0 convention).
double ndcg_at_k(std::span<const std::int32_t> ranklist, std::span<const double> rel,
                 const ExaminationModel& exam, int k);

// Prefix sums of the ideal (relevance-descending) position-weighted gains for
// cutoffs 1..max_cutoff. Constant per query; precompute once per run.
std::vector<double> ideal_prefix_gains(std::span<const double> rel, const ExaminationModel& exam,
                                       int max_cutoff);

// Pairwise proportionality violation between a cumulative value (income or
// exposure) and relevance:
//   1/(|D| (|D|-1)) * sum_{x,y} (V(x) R(y) - V(y) R(x))^2
// over ordered pairs; x = y terms are zero. Fairness is its negation.
double pairwise_unfairness(std::span<const double> value, std::span<const double> rel);

double income_unfairness(std::span<const ItemLedger> ledgers, std::span<const double> rel);
double exposure_unfairness(std::span<const ItemLedger> ledgers, std::span<const double> rel);

// Recency-discounted running mean of per-session NDCG at cutoffs 1..5,
// maintained incrementally:
//   S_c <- alpha * S_c + NDCG@c(pi_n),   W <- alpha * W + 1,
// reported as S_c / W. A policy whose every session scores NDCG 1 reports
// exactly 1 at any horizon.
class CndcgAccumulator {
public:
    static constexpr int kMaxCutoff = 5;

    explicit CndcgAccumulator(double alpha = 0.995) : alpha_(alpha) {}

    // ideal_prefix comes from ideal_prefix_gains for the same query; cutoffs
    // beyond min(kMaxCutoff, ranklist length, ideal_prefix size) are skipped.
    void add_session(std::span<const std::int32_t> ranklist, std::span<const double> rel,
                     const ExaminationModel& exam, std::span<const double> ideal_prefix);

    double cndcg_avg(int cutoff) const;
    long sessions() const { return sessions_; }
    void reset();

private:
    double alpha_;
    std::array<double, kMaxCutoff> weighted_sum_{};
    double weight_sum_ = 0.0;
    long sessions_ = 0;
};

}  // namespace didrf
