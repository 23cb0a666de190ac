#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "usermodel.hpp"

namespace didrf {

// Cumulative per-(query, item) state driven by displayed sessions. exposure
// accumulates examination probability mass, income accumulates that mass
// weighted by the income rate at session time, clicks accumulates realized
// clicks.
struct ItemLedger {
    double exposure = 0.0;
    double income = 0.0;
    double clicks = 0.0;
};

// Pseudo-count priors for the click-through relevance estimator. The
// defaults give never-shown items the symmetric estimate 0.5 and keep every
// denominator positive; their influence washes out as exposure grows.
struct EstimatorPriors {
    double exposure0 = 1.0;
    double clicks0 = 0.5;
};

// Fold one session into the ledgers: the item at position j <= k_c gains
// exposure p_j, income p_j * income_rate[item], and its click. income_rate is
// indexed by item (not position) and holds f_d(t) for the session's timestep.
void apply_session(std::span<ItemLedger> ledgers, std::span<const std::int32_t> ranklist,
                   std::span<const std::uint8_t> clicks, std::span<const double> income_rate,
                   const ExaminationModel& exam);

// Clipped click-through-rate estimate (clicks + prior) / (exposure + prior),
// clamped into [0, 1]. Raw ratios can exceed 1 in small samples because click
// increments are Bernoulli(p_j * R) while exposure increments are p_j.
double estimate_relevance(const ItemLedger& ledger, const EstimatorPriors& priors = {});

// Uncertainty-reduction gain per unit exposure at prior-adjusted exposure
// E^ = exposure + exposure0:  -1/E^2 + 1/E^3. Zero at E^ = 1, positive below,
// negative above.
double uncertainty_gain_at(double exposure_hat);
double uncertainty_gain(const ItemLedger& ledger, const EstimatorPriors& priors = {});

}  // namespace didrf
