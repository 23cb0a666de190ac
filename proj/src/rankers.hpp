#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ledger.hpp"
#include "rng.hpp"
#include "usermodel.hpp"

namespace didrf {

enum class Policy { RandomK, TopK, FairK, FairCo, MCFair, DIDRF, DIDRF_WO_h, DIDRF_WO_p };
enum class Mode { Offline, Online };

Policy policy_from_name(std::string_view name);
std::string_view policy_name(Policy policy);
Mode mode_from_name(std::string_view name);
std::string_view mode_name(Mode mode);

struct PolicyConfig {
    Policy policy = Policy::TopK;
    double gamma = 0.0;  // fairness trade-off
    double eta = 0.0;    // uncertainty trade-off (online)
    int k = 5;           // ranked-list length
    Mode mode = Mode::Offline;
};

// Additive decomposition of one item's session score.
//   offline total = relevance_term + gamma * phi
//   online  total = relevance_term + gamma * phi - eta * u
// with phi = g + h/2.
struct ScoreBreakdown {
    double relevance_term = 0.0;
    double g = 0.0;
    double h = 0.0;
    double phi = 0.0;
    double u = 0.0;
    double total = 0.0;
};

// Pairwise-fairness normalizer 4 / (|D| (|D|-1)).
double sigma_coefficient(std::size_t num_items);

// First derivative of the fairness objective w.r.t. item d's income:
//   g(d) = sigma * (R(d) * sum_l I(l) R(l)  -  I(d) * sum_l R(l)^2).
double fairness_grad_g(std::size_t d, std::span<const double> rel,
                       std::span<const ItemLedger> ledgers);

// Self-impact second-order term with the income rate folded in:
//   h(d) = -sigma * (sum_{s != d} R(s)^2) * f_d(t)^2.  Always <= 0.
double fairness_hess_h(std::size_t d, std::span<const double> rel, double f_d_t);

// Exact second-order expansion of fair(I + dI) - fair(I), every cross term of
// the Hessian included. The fairness objective is a quadratic polynomial of
// income, so this matches the direct difference to rounding error.
double fairness_delta_taylor(std::span<const double> rel, std::span<const double> income,
                             std::span<const double> delta_income);

// Per-(query, session) aggregates that make per-item scoring O(1). Build from
// the ledger state before the session; n is the 1-based session index.
struct ScoreContext {
    double sigma = 0.0;
    double sum_income_rel = 0.0;   // sum_l I(l) R(l)
    double sum_rel_sq = 0.0;       // sum_l R(l)^2
    double max_income_ratio = 0.0; // max_l I(l) / max(R(l), floor)
    long n = 1;
};

ScoreContext make_score_context(std::span<const double> rel, std::span<const ItemLedger> ledgers,
                                long n);

// Score one item under the configured policy. rel_d is the policy's
// relevance source (true R offline, estimated R online). rng is consumed only
// by RandomK.
ScoreBreakdown score_item(const PolicyConfig& cfg, const ScoreContext& ctx, double rel_d,
                          const ItemLedger& ledger, double f_d_t, const EstimatorPriors& priors,
                          Rng* rng = nullptr);

// Score every candidate of a query for one session.
void score_all(const PolicyConfig& cfg, std::span<const double> rel,
               std::span<const ItemLedger> ledgers, std::span<const double> income_rate, long n,
               const EstimatorPriors& priors, Rng* rng, std::vector<ScoreBreakdown>& out);

// Top-k by total, descending. Ties are broken by a seeded random permutation
// applied before the sort, so no item id is systematically favored over a
// long horizon.
void rank_by_score(std::span<const ScoreBreakdown> scores, int k, Rng& tie_rng,
                   std::vector<std::int32_t>& out);

// Enumeration oracle: the ordered k-arrangement maximizing the exact marginal
// objective sum_j p_j R(pi[j]) + gamma * (fair(after) - fair(before)), with
// the fairness delta evaluated directly from the pairwise metric (no Taylor
// expansion, no surrogate). |D| <= 8.
std::vector<std::int32_t> brute_force_best(std::span<const double> rel,
                                           std::span<const ItemLedger> ledgers, double f_t,
                                           double gamma, int k, const ExaminationModel& exam);

}  // namespace didrf
