#include "usermodel.hpp"

#include <cmath>
#include <stdexcept>

namespace didrf {

double examination_probability(int rank, int k_c) {
    if (rank < 1) throw std::domain_error("examination_probability: rank must be >= 1");
    if (rank > k_c) return 0.0;
    return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

void simulate_session(std::span<const std::int32_t> ranklist, std::span<const double> rel,
                      const ExaminationModel& exam, Rng& rng,
                      std::vector<std::uint8_t>& clicks_out) {
    clicks_out.resize(ranklist.size());
    for (std::size_t j = 0; j < ranklist.size(); ++j) {
        const double u = rng.next_double();
        const double p = exam.prob(static_cast<int>(j) + 1);
        const double click_prob = p * rel[static_cast<std::size_t>(ranklist[j])];
        clicks_out[j] = u < click_prob ? 1 : 0;
    }
}

}  // namespace didrf
