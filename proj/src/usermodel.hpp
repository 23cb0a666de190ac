#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rng.hpp"

namespace didrf {

// Rank-position examination probability: 1/log2(rank+1) down to the cutoff
// k_c, zero beyond it. rank is 1-based.
double examination_probability(int rank, int k_c);

// Position-biased, cutoff-limited examination model. The discount is
// non-increasing in rank by construction.
struct ExaminationModel {
    int k_c = 5;

    double prob(int rank) const { return examination_probability(rank, k_c); }
};

// Draw one session of clicks for a displayed ranklist. One uniform draw is
// consumed per displayed position, in rank order, so the draw sequence does
// not depend on anything but the list length. click_j ~ Bernoulli(p_j * R_j)
// with p_j = 0 beyond k_c.
void simulate_session(std::span<const std::int32_t> ranklist, std::span<const double> rel,
                      const ExaminationModel& exam, Rng& rng,
                      std::vector<std::uint8_t>& clicks_out);

}  // namespace didrf
