#include "metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "errors.hpp"

namespace didrf {

std::vector<double> ideal_prefix_gains(std::span<const double> rel, const ExaminationModel& exam,
                                       int max_cutoff) {
    std::vector<double> sorted(rel.begin(), rel.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const int depth = std::min<int>(max_cutoff, static_cast<int>(sorted.size()));
    std::vector<double> prefix(static_cast<std::size_t>(depth));
    double acc = 0.0;
    for (int i = 0; i < depth; ++i) {
        acc += sorted[static_cast<std::size_t>(i)] * exam.prob(i + 1);
        prefix[static_cast<std::size_t>(i)] = acc;
    }
    return prefix;
}

double ndcg_at_k(std::span<const std::int32_t> ranklist, std::span<const double> rel,
                 const ExaminationModel& exam, int k) {
    if (k < 1) throw std::domain_error("ndcg_at_k: k must be >= 1");
    if (static_cast<std::size_t>(k) > ranklist.size())
        throw std::domain_error("ndcg_at_k: k exceeds ranklist length");
    const auto ideal = ideal_prefix_gains(rel, exam, k);
    double numerator = 0.0;
    for (int i = 0; i < k; ++i) {
        const auto d = static_cast<std::size_t>(ranklist[static_cast<std::size_t>(i)]);
        numerator += rel[d] * exam.prob(i + 1);
    }
    const double denominator = ideal[static_cast<std::size_t>(k - 1)];
    if (denominator == 0.0) return 1.0;
    return numerator / denominator;
}

double pairwise_unfairness(std::span<const double> value, std::span<const double> rel) {
    const std::size_t n = value.size();
    if (n < 2) throw std::domain_error("pairwise_unfairness: need at least 2 items");
    if (rel.size() != n) throw std::invalid_argument("pairwise_unfairness: size mismatch");
    double sum = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            const double cross = value[x] * rel[y] - value[y] * rel[x];
            sum += cross * cross;
        }
    }
    return sum / (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

namespace {

template <typename Get>
double ledger_unfairness(std::span<const ItemLedger> ledgers, std::span<const double> rel,
                         Get get) {
    thread_local std::vector<double> values;
    values.resize(ledgers.size());
    for (std::size_t i = 0; i < ledgers.size(); ++i) values[i] = get(ledgers[i]);
    return pairwise_unfairness(values, rel);
}

}  // namespace

double income_unfairness(std::span<const ItemLedger> ledgers, std::span<const double> rel) {
    return ledger_unfairness(ledgers, rel, [](const ItemLedger& l) { return l.income; });
}

double exposure_unfairness(std::span<const ItemLedger> ledgers, std::span<const double> rel) {
    return ledger_unfairness(ledgers, rel, [](const ItemLedger& l) { return l.exposure; });
}

void CndcgAccumulator::add_session(std::span<const std::int32_t> ranklist,
                                   std::span<const double> rel, const ExaminationModel& exam,
                                   std::span<const double> ideal_prefix) {
    const int depth = std::min({static_cast<int>(kMaxCutoff), static_cast<int>(ranklist.size()),
                                static_cast<int>(ideal_prefix.size())});
    double numerator = 0.0;
    for (int i = 0; i < depth; ++i) {
        const auto d = static_cast<std::size_t>(ranklist[static_cast<std::size_t>(i)]);
        numerator += rel[d] * exam.prob(i + 1);
        const double denominator = ideal_prefix[static_cast<std::size_t>(i)];
        const double ndcg = denominator == 0.0 ? 1.0 : numerator / denominator;
        weighted_sum_[static_cast<std::size_t>(i)] =
            alpha_ * weighted_sum_[static_cast<std::size_t>(i)] + ndcg;
    }
    // Cutoffs beyond the displayed depth decay without new mass.
    for (int i = depth; i < kMaxCutoff; ++i)
        weighted_sum_[static_cast<std::size_t>(i)] *= alpha_;
    weight_sum_ = alpha_ * weight_sum_ + 1.0;
    ++sessions_;
}

double CndcgAccumulator::cndcg_avg(int cutoff) const {
    if (cutoff < 1 || cutoff > kMaxCutoff)
        throw std::domain_error("cndcg_avg: cutoff must be in 1..5");
    if (sessions_ == 0) throw std::domain_error("cndcg_avg: no sessions accumulated");
    return weighted_sum_[static_cast<std::size_t>(cutoff - 1)] / weight_sum_;
}

void CndcgAccumulator::reset() {
    weighted_sum_.fill(0.0);
    weight_sum_ = 0.0;
    sessions_ = 0;
}

}  // namespace didrf
