#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "corpus.hpp"
#include "income.hpp"
#include "ledger.hpp"
#include "metrics.hpp"
#include "rankers.hpp"
#include "usermodel.hpp"

namespace didrf {

// Read-only assets shared by every (query, trial) task of an experiment.
struct PreparedCorpus {
    QuerySet queries;
    RelevanceTable relevance;
    std::vector<std::vector<long>> phases;        // per query, empty when unused
    std::vector<std::vector<double>> ideal_gain;  // per query, NDCG denominators
    int max_cutoff = 5;                           // min(5, k, k_c)
};

PreparedCorpus prepare_corpus(const RunConfig& cfg);

struct SessionLogRow {
    long t = 0;
    std::int32_t position = 0;  // 1-based rank
    std::int32_t item = 0;      // item index within the query
    double exposure_increment = 0.0;
    double income_increment = 0.0;
    std::uint8_t click = 0;
};

// Per-(session, candidate) score decomposition, for debugging score paths.
struct ScoreLogRow {
    long t = 0;
    std::int32_t item = 0;
    ScoreBreakdown score;
};

// One query's feedback loop for one trial. Sessions are strictly sequential;
// state at timestep n prices the list chosen at n. Construction derives
// independent tie-break / click / score generators from (trial_seed,
// query_index) so tasks can run in any order.
class QueryRunner {
public:
    // Test hook: force the online loop to score with the true relevance (the
    // estimator oracle) instead of ledger estimates.
    enum class RelevanceSource { PolicyDefault, TrueOracle };

    QueryRunner(const PreparedCorpus& corpus, std::size_t query_index, const IncomeFunction& income,
                const PolicyConfig& policy, const ExaminationModel& exam,
                const EstimatorPriors& priors, double alpha, std::uint64_t trial_seed);

    // One session at (global) timestep t; the income function is evaluated at
    // t while feedback controllers see the query-local session count.
    void step(long t);
    void run(long horizon);                       // sessions at t = 1..horizon
    void run_at(std::span<const long> times);     // explicit session times

    void set_relevance_source(RelevanceSource src) { source_ = src; }
    void enable_timing(bool on) { timing_enabled_ = on; }
    void set_log(std::vector<SessionLogRow>* log) { log_ = log; }
    void set_score_log(std::vector<ScoreLogRow>* log) { score_log_ = log; }

    const std::vector<ItemLedger>& ledgers() const { return ledgers_; }
    const std::vector<std::int32_t>& last_ranklist() const { return ranklist_; }
    const std::vector<std::uint8_t>& last_clicks() const { return clicks_; }
    const CndcgAccumulator& metrics() const { return metrics_; }
    std::span<const double> true_relevance() const { return true_rel_; }
    std::int64_t scoring_nanos() const { return scoring_nanos_; }
    long sessions_run() const { return sessions_run_; }

    double final_income_unfairness() const;
    double final_exposure_unfairness() const;

private:
    std::span<const double> true_rel_;
    std::span<const long> phases_;
    std::span<const double> ideal_gain_;
    const IncomeFunction& income_;
    PolicyConfig policy_;
    ExaminationModel exam_;
    EstimatorPriors priors_;
    RelevanceSource source_ = RelevanceSource::PolicyDefault;

    std::vector<ItemLedger> ledgers_;
    CndcgAccumulator metrics_;
    Rng tie_rng_;
    Rng click_rng_;
    Rng score_rng_;

    std::vector<double> estimates_;
    std::vector<double> income_rate_;
    std::vector<ScoreBreakdown> scores_;
    std::vector<std::int32_t> ranklist_;
    std::vector<std::uint8_t> clicks_;

    bool timing_enabled_ = false;
    std::int64_t scoring_nanos_ = 0;
    long sessions_run_ = 0;
    std::vector<SessionLogRow>* log_ = nullptr;
    std::vector<ScoreLogRow>* score_log_ = nullptr;
};

// Aggregated metrics for one trial of one grid point (means over queries).
struct TrialMetrics {
    double unfairness_income = 0.0;
    double unfairness_exposure = 0.0;
    std::array<double, CndcgAccumulator::kMaxCutoff> cndcg{};
    double wall_seconds = 0.0;
};

struct RunResult {
    Policy policy;
    Mode mode;
    double gamma = 0.0;
    double eta = 0.0;
    std::vector<TrialMetrics> trials;
    TrialMetrics mean;
};

struct ExperimentResults {
    std::vector<RunResult> runs;  // one entry per (gamma, eta) grid point
    int max_cutoff = 5;
};

// Simulate every grid point of the config (a single point when no sweep is
// configured). Deterministic for a fixed (config, base_seed) regardless of
// thread count.
ExperimentResults run_experiment(const RunConfig& cfg, const PreparedCorpus& corpus);
ExperimentResults run_experiment(const RunConfig& cfg);

struct PolicyTiming {
    Policy policy;
    long sessions = 0;
    double scoring_seconds = 0.0;  // scoring + sorting only
    double mean_session_micros = 0.0;
};

// Per-policy scoring+sorting cost over the configured run.
std::vector<PolicyTiming> timing_report(const RunConfig& cfg);

// Output files under cfg.output_dir: results.csv, frontier.csv,
// run_meta.json, and sessions.csv.gz when session logging is on.
void write_outputs(const RunConfig& cfg, const ExperimentResults& results);
void write_timing_csv(const RunConfig& cfg, const std::vector<PolicyTiming>& timings);

// Loads the dataset and checks every cross-field constraint that needs data
// (e.g. k <= |D(q)|). Returns a human-readable summary.
std::string validate_run(const RunConfig& cfg);

}  // namespace didrf
