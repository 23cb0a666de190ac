#include "rankers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "errors.hpp"
#include "metrics.hpp"

namespace didrf {

namespace {
constexpr double kFairCoRelevanceFloor = 1e-6;
}

Policy policy_from_name(std::string_view name) {
    if (name == "RandomK") return Policy::RandomK;
    if (name == "TopK") return Policy::TopK;
    if (name == "FairK") return Policy::FairK;
    if (name == "FairCo") return Policy::FairCo;
    if (name == "MCFair") return Policy::MCFair;
    if (name == "DIDRF") return Policy::DIDRF;
    if (name == "DIDRF_WO_h") return Policy::DIDRF_WO_h;
    if (name == "DIDRF_WO_p") return Policy::DIDRF_WO_p;
    throw ConfigError("unknown policy '" + std::string(name) + "'");
}

std::string_view policy_name(Policy policy) {
    switch (policy) {
        case Policy::RandomK: return "RandomK";
        case Policy::TopK: return "TopK";
        case Policy::FairK: return "FairK";
        case Policy::FairCo: return "FairCo";
        case Policy::MCFair: return "MCFair";
        case Policy::DIDRF: return "DIDRF";
        case Policy::DIDRF_WO_h: return "DIDRF_WO_h";
        case Policy::DIDRF_WO_p: return "DIDRF_WO_p";
    }
    return "?";
}

Mode mode_from_name(std::string_view name) {
    if (name == "offline") return Mode::Offline;
    if (name == "online") return Mode::Online;
    throw ConfigError("unknown mode '" + std::string(name) + "' (expected offline|online)");
}

std::string_view mode_name(Mode mode) { return mode == Mode::Offline ? "offline" : "online"; }

double sigma_coefficient(std::size_t num_items) {
    if (num_items < 2) throw std::domain_error("sigma_coefficient: need at least 2 items");
    const double n = static_cast<double>(num_items);
    return 4.0 / (n * (n - 1.0));
}

double fairness_grad_g(std::size_t d, std::span<const double> rel,
                       std::span<const ItemLedger> ledgers) {
    const ScoreContext ctx = make_score_context(rel, ledgers, 1);
    return ctx.sigma * (rel[d] * ctx.sum_income_rel - ledgers[d].income * ctx.sum_rel_sq);
}

double fairness_hess_h(std::size_t d, std::span<const double> rel, double f_d_t) {
    const double sigma = sigma_coefficient(rel.size());
    double sum_other_sq = 0.0;
    for (std::size_t s = 0; s < rel.size(); ++s)
        if (s != d) sum_other_sq += rel[s] * rel[s];
    return -sigma * sum_other_sq * f_d_t * f_d_t;
}

double fairness_delta_taylor(std::span<const double> rel, std::span<const double> income,
                             std::span<const double> delta_income) {
    const std::size_t n = rel.size();
    const double sigma = sigma_coefficient(n);

    double sum_income_rel = 0.0;
    double sum_rel_sq = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        sum_income_rel += income[l] * rel[l];
        sum_rel_sq += rel[l] * rel[l];
    }

    double first = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        const double g = sigma * (rel[d] * sum_income_rel - income[d] * sum_rel_sq);
        first += g * delta_income[d];
    }

    double second = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            const double hess =
                -sigma * ((x == y ? sum_rel_sq : 0.0) - rel[x] * rel[y]);
            second += hess * delta_income[x] * delta_income[y];
        }
    }
    return first + 0.5 * second;
}

ScoreContext make_score_context(std::span<const double> rel, std::span<const ItemLedger> ledgers,
                                long n) {
    ScoreContext ctx;
    ctx.sigma = sigma_coefficient(rel.size());
    ctx.n = n;
    for (std::size_t l = 0; l < rel.size(); ++l) {
        ctx.sum_income_rel += ledgers[l].income * rel[l];
        ctx.sum_rel_sq += rel[l] * rel[l];
        const double ratio = ledgers[l].income / std::max(rel[l], kFairCoRelevanceFloor);
        ctx.max_income_ratio = std::max(ctx.max_income_ratio, ratio);
    }
    return ctx;
}

ScoreBreakdown score_item(const PolicyConfig& cfg, const ScoreContext& ctx, double rel_d,
                          const ItemLedger& ledger, double f_d_t, const EstimatorPriors& priors,
                          Rng* rng) {
    ScoreBreakdown s;
    s.relevance_term = rel_d;

    const bool online = cfg.mode == Mode::Online;
    const double g = ctx.sigma * (rel_d * ctx.sum_income_rel - ledger.income * ctx.sum_rel_sq);
    const double h = -ctx.sigma * (ctx.sum_rel_sq - rel_d * rel_d) * f_d_t * f_d_t;
    const auto u_full = [&] { return uncertainty_gain_at(ledger.exposure + priors.exposure0); };
    const auto u_linear = [&] {
        const double exposure_hat = ledger.exposure + priors.exposure0;
        if (exposure_hat <= 0.0)
            throw std::domain_error("score_item: zero exposure and zero prior");
        return -1.0 / (exposure_hat * exposure_hat);
    };

    switch (cfg.policy) {
        case Policy::TopK:
            s.total = rel_d;
            break;
        case Policy::RandomK:
            if (!rng) throw std::invalid_argument("score_item: RandomK needs a generator");
            s.total = rng->next_double();
            break;
        case Policy::FairK:
            s.g = g;
            s.h = h;
            s.phi = g + 0.5 * h;
            s.total = s.phi;
            break;
        case Policy::FairCo: {
            // Proportional controller reconstructed from its exposure-based
            // original: the correction grows with the worst income-per-
            // relevance deficit against any other item.
            const double err = std::max(
                0.0, ctx.max_income_ratio -
                         ledger.income / std::max(rel_d, kFairCoRelevanceFloor));
            s.total = rel_d + cfg.gamma * static_cast<double>(ctx.n - 1) * err;
            break;
        }
        case Policy::MCFair:
            s.g = g;
            s.phi = g;
            if (online) {
                s.u = u_linear();
                s.total = rel_d + cfg.gamma * s.phi - cfg.eta * s.u;
            } else {
                s.total = rel_d + cfg.gamma * s.phi;
            }
            break;
        case Policy::DIDRF_WO_h:
            s.g = g;
            s.phi = g;
            if (online) {
                s.u = u_full();
                s.total = rel_d + cfg.gamma * s.phi - cfg.eta * s.u;
            } else {
                s.total = rel_d + cfg.gamma * s.phi;
            }
            break;
        case Policy::DIDRF_WO_p:
            s.g = g;
            s.h = h;
            s.phi = g + 0.5 * h;
            if (online) {
                s.u = u_linear();  // second-order 1/E^3 component removed
                s.total = rel_d + cfg.gamma * s.phi - cfg.eta * s.u;
            } else {
                s.total = rel_d + cfg.gamma * s.phi;
            }
            break;
        case Policy::DIDRF:
            s.g = g;
            s.h = h;
            s.phi = g + 0.5 * h;
            if (online) {
                s.u = u_full();
                s.total = rel_d + cfg.gamma * s.phi - cfg.eta * s.u;
            } else {
                s.total = rel_d + cfg.gamma * s.phi;
            }
            break;
    }
    return s;
}

void score_all(const PolicyConfig& cfg, std::span<const double> rel,
               std::span<const ItemLedger> ledgers, std::span<const double> income_rate, long n,
               const EstimatorPriors& priors, Rng* rng, std::vector<ScoreBreakdown>& out) {
    const ScoreContext ctx = make_score_context(rel, ledgers, n);
    out.resize(rel.size());
    for (std::size_t d = 0; d < rel.size(); ++d)
        out[d] = score_item(cfg, ctx, rel[d], ledgers[d], income_rate[d], priors, rng);
}

void rank_by_score(std::span<const ScoreBreakdown> scores, int k, Rng& tie_rng,
                   std::vector<std::int32_t>& out) {
    const std::size_t n = scores.size();
    if (k < 0 || static_cast<std::size_t>(k) > n)
        throw ConfigError("rank_by_score: k must be in 0..|D|");

    thread_local std::vector<std::int32_t> perm;
    thread_local std::vector<std::int32_t> tie_rank;
    perm.resize(n);
    tie_rank.resize(n);
    std::iota(perm.begin(), perm.end(), 0);
    tie_rng.shuffle(perm);
    for (std::size_t pos = 0; pos < n; ++pos)
        tie_rank[static_cast<std::size_t>(perm[pos])] = static_cast<std::int32_t>(pos);

    out.resize(n);
    std::iota(out.begin(), out.end(), 0);
    std::sort(out.begin(), out.end(), [&](std::int32_t a, std::int32_t b) {
        const double ta = scores[static_cast<std::size_t>(a)].total;
        const double tb = scores[static_cast<std::size_t>(b)].total;
        if (ta != tb) return ta > tb;
        return tie_rank[static_cast<std::size_t>(a)] < tie_rank[static_cast<std::size_t>(b)];
    });
    out.resize(static_cast<std::size_t>(k));
}

std::vector<std::int32_t> brute_force_best(std::span<const double> rel,
                                           std::span<const ItemLedger> ledgers, double f_t,
                                           double gamma, int k, const ExaminationModel& exam) {
    const std::size_t n = rel.size();
    if (n > 8) throw std::domain_error("brute_force_best: |D| > 8 is not enumerable");
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw ConfigError("brute_force_best: k must be in 1..|D|");

    std::vector<double> income_before(n);
    for (std::size_t d = 0; d < n; ++d) income_before[d] = ledgers[d].income;
    const double fair_before = -pairwise_unfairness(income_before, rel);

    std::vector<std::int32_t> current(static_cast<std::size_t>(k));
    std::vector<std::int32_t> best;
    std::vector<bool> used(n, false);
    std::vector<double> income_after(n);
    double best_value = 0.0;

    auto evaluate = [&]() {
        double delta_eff = 0.0;
        income_after = income_before;
        for (int j = 0; j < k; ++j) {
            const auto d = static_cast<std::size_t>(current[static_cast<std::size_t>(j)]);
            const double p = exam.prob(j + 1);
            delta_eff += p * rel[d];
            income_after[d] += p * f_t;
        }
        const double fair_after = -pairwise_unfairness(income_after, rel);
        const double value = delta_eff + gamma * (fair_after - fair_before);
        if (best.empty() || value > best_value) {
            best = current;
            best_value = value;
        }
    };

    auto recurse = [&](auto&& self, int depth) -> void {
        if (depth == k) {
            evaluate();
            return;
        }
        for (std::size_t d = 0; d < n; ++d) {
            if (used[d]) continue;
            used[d] = true;
            current[static_cast<std::size_t>(depth)] = static_cast<std::int32_t>(d);
            self(self, depth + 1);
            used[d] = false;
        }
    };
    recurse(recurse, 0);
    return best;
}

}  // namespace didrf
