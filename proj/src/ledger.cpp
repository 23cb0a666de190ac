#include "ledger.hpp"

#include <algorithm>
#include <stdexcept>

namespace didrf {

void apply_session(std::span<ItemLedger> ledgers, std::span<const std::int32_t> ranklist,
                   std::span<const std::uint8_t> clicks, std::span<const double> income_rate,
                   const ExaminationModel& exam) {
    if (clicks.size() != ranklist.size())
        throw std::invalid_argument("apply_session: clicks/ranklist length mismatch");
    const std::size_t shown = std::min(ranklist.size(), static_cast<std::size_t>(exam.k_c));
    for (std::size_t j = 0; j < shown; ++j) {
        const auto d = static_cast<std::size_t>(ranklist[j]);
        const double p = exam.prob(static_cast<int>(j) + 1);
        ledgers[d].exposure += p;
        ledgers[d].income += p * income_rate[d];
        ledgers[d].clicks += clicks[j];
    }
}

double estimate_relevance(const ItemLedger& ledger, const EstimatorPriors& priors) {
    const double exposure_hat = ledger.exposure + priors.exposure0;
    if (exposure_hat <= 0.0)
        throw std::domain_error("estimate_relevance: zero exposure and zero prior");
    const double raw = (ledger.clicks + priors.clicks0) / exposure_hat;
    return std::clamp(raw, 0.0, 1.0);
}

double uncertainty_gain_at(double exposure_hat) {
    if (exposure_hat <= 0.0)
        throw std::domain_error("uncertainty_gain: exposure must be positive");
    const double inv_sq = 1.0 / (exposure_hat * exposure_hat);
    return -inv_sq + inv_sq / exposure_hat;
}

double uncertainty_gain(const ItemLedger& ledger, const EstimatorPriors& priors) {
    return uncertainty_gain_at(ledger.exposure + priors.exposure0);
}

}  // namespace didrf
