#include "harness.hpp"

#include <zlib.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "errors.hpp"

namespace didrf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Run fn(0..count-1) across a small worker pool. Tasks own disjoint output
// slots, so scheduling order cannot change results.
void parallel_tasks(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

PreparedCorpus prepare_corpus(const RunConfig& cfg) {
    PreparedCorpus corpus;
    if (cfg.dataset.type == DatasetSpec::Type::Letor) {
        std::vector<std::string> warnings;
        corpus.queries = parse_letor(cfg.dataset.path, cfg.dataset.y_max, &warnings);
        for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    } else {
        corpus.queries = synth_queryset(cfg.dataset.num_queries, cfg.dataset.docs_per_query,
                                        cfg.dataset.grade_distribution, cfg.dataset.seed);
    }
    for (const Query& q : corpus.queries.queries) {
        if (static_cast<std::size_t>(cfg.k) > q.items.size())
            throw ConfigError("k=" + std::to_string(cfg.k) + " exceeds |D|=" +
                              std::to_string(q.items.size()) + " for query '" + q.id + "'");
    }
    corpus.relevance = make_relevance_table(corpus.queries, cfg.epsilon);
    corpus.max_cutoff = std::min({CndcgAccumulator::kMaxCutoff, cfg.k, cfg.k_c});

    const ExaminationModel exam{cfg.k_c};
    const IncomeFunction income(cfg.income);
    corpus.ideal_gain.reserve(corpus.queries.queries.size());
    corpus.phases.resize(corpus.queries.queries.size());
    for (std::size_t qi = 0; qi < corpus.queries.queries.size(); ++qi) {
        corpus.ideal_gain.push_back(
            ideal_prefix_gains(corpus.relevance.rel[qi], exam, corpus.max_cutoff));
        if (income.has_phases()) {
            auto& row = corpus.phases[qi];
            row.reserve(corpus.queries.queries[qi].items.size());
            for (const Item& item : corpus.queries.queries[qi].items)
                row.push_back(income.phase_of(item.id));
        }
    }
    return corpus;
}

QueryRunner::QueryRunner(const PreparedCorpus& corpus, std::size_t query_index,
                         const IncomeFunction& income, const PolicyConfig& policy,
                         const ExaminationModel& exam, const EstimatorPriors& priors, double alpha,
                         std::uint64_t trial_seed)
    : true_rel_(corpus.relevance.rel[query_index]),
      phases_(corpus.phases[query_index]),
      ideal_gain_(corpus.ideal_gain[query_index]),
      income_(income),
      policy_(policy),
      exam_(exam),
      priors_(priors),
      ledgers_(true_rel_.size()),
      metrics_(alpha),
      tie_rng_(derive_seed(trial_seed, query_index, kStreamTieBreak)),
      click_rng_(derive_seed(trial_seed, query_index, kStreamClicks)),
      score_rng_(derive_seed(trial_seed, query_index, kStreamScores)) {
    estimates_.resize(true_rel_.size());
    income_rate_.resize(true_rel_.size());
}

void QueryRunner::step(long t) {
    const bool online =
        policy_.mode == Mode::Online && source_ == RelevanceSource::PolicyDefault;
    std::span<const double> rel_for_policy = true_rel_;
    if (online) {
        for (std::size_t d = 0; d < ledgers_.size(); ++d)
            estimates_[d] = estimate_relevance(ledgers_[d], priors_);
        rel_for_policy = estimates_;
    }

    if (phases_.empty()) {
        const double f = income_.at(t);
        std::fill(income_rate_.begin(), income_rate_.end(), f);
    } else {
        for (std::size_t d = 0; d < income_rate_.size(); ++d)
            income_rate_[d] = income_.at_phased(t, phases_[d]);
    }

    const long session_index = sessions_run_ + 1;
    if (timing_enabled_) {
        const auto start = Clock::now();
        score_all(policy_, rel_for_policy, ledgers_, income_rate_, session_index, priors_,
                  &score_rng_, scores_);
        rank_by_score(scores_, policy_.k, tie_rng_, ranklist_);
        scoring_nanos_ +=
            std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
    } else {
        score_all(policy_, rel_for_policy, ledgers_, income_rate_, session_index, priors_,
                  &score_rng_, scores_);
        rank_by_score(scores_, policy_.k, tie_rng_, ranklist_);
    }

    if (score_log_) {
        for (std::size_t d = 0; d < scores_.size(); ++d)
            score_log_->push_back(ScoreLogRow{t, static_cast<std::int32_t>(d), scores_[d]});
    }

    simulate_session(ranklist_, true_rel_, exam_, click_rng_, clicks_);
    metrics_.add_session(ranklist_, true_rel_, exam_, ideal_gain_);

    if (log_) {
        const std::size_t shown =
            std::min(ranklist_.size(), static_cast<std::size_t>(exam_.k_c));
        for (std::size_t j = 0; j < shown; ++j) {
            const auto d = static_cast<std::size_t>(ranklist_[j]);
            const double p = exam_.prob(static_cast<int>(j) + 1);
            log_->push_back(SessionLogRow{t, static_cast<std::int32_t>(j + 1), ranklist_[j],
                                          p, p * income_rate_[d], clicks_[j]});
        }
    }

    apply_session(ledgers_, ranklist_, clicks_, income_rate_, exam_);
    ++sessions_run_;
}

void QueryRunner::run(long horizon) {
    for (long t = 1; t <= horizon; ++t) step(t);
}

void QueryRunner::run_at(std::span<const long> times) {
    for (long t : times) step(t);
}

double QueryRunner::final_income_unfairness() const {
    return income_unfairness(ledgers_, true_rel_);
}

double QueryRunner::final_exposure_unfairness() const {
    return exposure_unfairness(ledgers_, true_rel_);
}

namespace {

struct TaskResult {
    double unfairness_income = 0.0;
    double unfairness_exposure = 0.0;
    std::array<double, CndcgAccumulator::kMaxCutoff> cndcg{};
    double wall_seconds = 0.0;
    std::int64_t scoring_nanos = 0;
    long sessions = 0;
    std::vector<SessionLogRow> log;
    std::vector<ScoreLogRow> score_log;
};

// One grid point: trials x queries tasks, each into its own slot.
std::vector<TaskResult> simulate_grid_point(const RunConfig& cfg, const PreparedCorpus& corpus,
                                            const IncomeFunction& income,
                                            const PolicyConfig& policy, bool timing) {
    const std::size_t num_queries = corpus.queries.queries.size();
    const std::size_t count = static_cast<std::size_t>(cfg.trials) * num_queries;
    std::vector<TaskResult> slots(count);
    const ExaminationModel exam{cfg.k_c};
    const EstimatorPriors priors{};

    // Session times per query: the whole horizon each under PerQuery, or the
    // query's slice of one global round-robin clock under SharedClock.
    std::vector<std::vector<long>> session_times(num_queries);
    if (cfg.session_allocation == SessionAllocation::SharedClock) {
        for (long t = 1; t <= cfg.horizon; ++t)
            session_times[static_cast<std::size_t>((t - 1) % static_cast<long>(num_queries))]
                .push_back(t);
    }

    parallel_tasks(count, cfg.threads, [&](std::size_t task) {
        const std::size_t trial = task / num_queries;
        const std::size_t qi = task % num_queries;
        const std::uint64_t trial_seed = cfg.base_seed + trial;

        const auto start = Clock::now();
        QueryRunner runner(corpus, qi, income, policy, exam, priors, cfg.alpha, trial_seed);
        runner.enable_timing(timing);
        TaskResult& out = slots[task];
        if (cfg.log_sessions) runner.set_log(&out.log);
        if (cfg.log_scores) runner.set_score_log(&out.score_log);
        if (cfg.session_allocation == SessionAllocation::SharedClock)
            runner.run_at(session_times[qi]);
        else
            runner.run(cfg.horizon);

        out.unfairness_income = runner.final_income_unfairness();
        out.unfairness_exposure = runner.final_exposure_unfairness();
        for (int c = 1; c <= corpus.max_cutoff; ++c)
            out.cndcg[static_cast<std::size_t>(c - 1)] = runner.metrics().cndcg_avg(c);
        out.scoring_nanos = runner.scoring_nanos();
        out.sessions = runner.sessions_run();
        out.wall_seconds = seconds_since(start);
    });
    return slots;
}

RunResult aggregate_grid_point(const RunConfig& cfg, const PreparedCorpus& corpus,
                               const PolicyConfig& policy, const std::vector<TaskResult>& slots) {
    const std::size_t num_queries = corpus.queries.queries.size();
    RunResult result;
    result.policy = policy.policy;
    result.mode = policy.mode;
    result.gamma = policy.gamma;
    result.eta = policy.eta;
    result.trials.resize(static_cast<std::size_t>(cfg.trials));

    for (std::size_t trial = 0; trial < result.trials.size(); ++trial) {
        TrialMetrics& tm = result.trials[trial];
        for (std::size_t qi = 0; qi < num_queries; ++qi) {
            const TaskResult& task = slots[trial * num_queries + qi];
            tm.unfairness_income += task.unfairness_income;
            tm.unfairness_exposure += task.unfairness_exposure;
            for (int c = 0; c < corpus.max_cutoff; ++c)
                tm.cndcg[static_cast<std::size_t>(c)] += task.cndcg[static_cast<std::size_t>(c)];
            tm.wall_seconds += task.wall_seconds;
        }
        const double nq = static_cast<double>(num_queries);
        tm.unfairness_income /= nq;
        tm.unfairness_exposure /= nq;
        for (int c = 0; c < corpus.max_cutoff; ++c) tm.cndcg[static_cast<std::size_t>(c)] /= nq;
    }

    TrialMetrics& mean = result.mean;
    for (const TrialMetrics& tm : result.trials) {
        mean.unfairness_income += tm.unfairness_income;
        mean.unfairness_exposure += tm.unfairness_exposure;
        for (int c = 0; c < corpus.max_cutoff; ++c)
            mean.cndcg[static_cast<std::size_t>(c)] += tm.cndcg[static_cast<std::size_t>(c)];
        mean.wall_seconds += tm.wall_seconds;
    }
    const double nt = static_cast<double>(result.trials.size());
    mean.unfairness_income /= nt;
    mean.unfairness_exposure /= nt;
    for (int c = 0; c < corpus.max_cutoff; ++c) mean.cndcg[static_cast<std::size_t>(c)] /= nt;
    mean.wall_seconds /= nt;
    return result;
}

void write_session_log_gz(const std::string& path, const RunConfig& cfg,
                          const PreparedCorpus& corpus, const std::vector<TaskResult>& slots) {
    gzFile gz = gzopen(path.c_str(), "wb");
    if (!gz) throw DataError("cannot open session log for writing: " + path);
    const std::size_t num_queries = corpus.queries.queries.size();
    std::string buffer = "t,query_id,position,item_id,exposure_increment,income_increment,click\n";
    char line[256];
    for (std::size_t task = 0; task < slots.size(); ++task) {
        const std::size_t qi = task % num_queries;
        const Query& q = corpus.queries.queries[qi];
        for (const SessionLogRow& row : slots[task].log) {
            std::snprintf(line, sizeof(line), "%ld,%s,%d,%s,%.17g,%.17g,%d\n", row.t,
                          q.id.c_str(), row.position,
                          q.items[static_cast<std::size_t>(row.item)].id.c_str(),
                          row.exposure_increment, row.income_increment, row.click);
            buffer += line;
            if (buffer.size() > (1u << 20)) {
                gzwrite(gz, buffer.data(), static_cast<unsigned>(buffer.size()));
                buffer.clear();
            }
        }
    }
    (void)cfg;
    if (!buffer.empty()) gzwrite(gz, buffer.data(), static_cast<unsigned>(buffer.size()));
    gzclose(gz);
}

void write_score_log_csv(const std::string& path, const PreparedCorpus& corpus,
                         const std::vector<TaskResult>& slots) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write score log: " + path);
    out << "t,query_id,item_id,relevance_term,g,h,phi,u,total\n";
    out.precision(17);
    const std::size_t num_queries = corpus.queries.queries.size();
    for (std::size_t task = 0; task < slots.size(); ++task) {
        const Query& q = corpus.queries.queries[task % num_queries];
        for (const ScoreLogRow& row : slots[task].score_log) {
            const ScoreBreakdown& b = row.score;
            out << row.t << ',' << q.id << ','
                << q.items[static_cast<std::size_t>(row.item)].id << ',' << b.relevance_term
                << ',' << b.g << ',' << b.h << ',' << b.phi << ',' << b.u << ',' << b.total
                << '\n';
        }
    }
}

}  // namespace

ExperimentResults run_experiment(const RunConfig& cfg, const PreparedCorpus& corpus) {
    if (cfg.session_allocation == SessionAllocation::SharedClock &&
        static_cast<std::size_t>(cfg.horizon) < corpus.queries.queries.size())
        throw ConfigError("horizon must be >= the query count under shared_clock allocation");
    const IncomeFunction income(cfg.income);

    std::vector<std::pair<double, double>> grid;
    if (cfg.sweep) {
        const std::vector<double> etas =
            cfg.sweep->etas.empty() ? std::vector<double>{cfg.eta} : cfg.sweep->etas;
        for (double g : cfg.sweep->gammas)
            for (double e : etas) grid.emplace_back(g, e);
    } else {
        grid.emplace_back(cfg.gamma, cfg.eta);
    }

    ExperimentResults results;
    results.max_cutoff = corpus.max_cutoff;
    results.runs.reserve(grid.size());
    for (const auto& [gamma, eta] : grid) {
        PolicyConfig policy{cfg.policy, gamma, eta, cfg.k, cfg.mode};
        const auto slots = simulate_grid_point(cfg, corpus, income, policy, false);
        results.runs.push_back(aggregate_grid_point(cfg, corpus, policy, slots));
        if (grid.size() == 1) {
            if (cfg.log_sessions) {
                std::filesystem::create_directories(cfg.output_dir);
                write_session_log_gz(cfg.output_dir + "/sessions.csv.gz", cfg, corpus, slots);
            }
            if (cfg.log_scores) {
                std::filesystem::create_directories(cfg.output_dir);
                write_score_log_csv(cfg.output_dir + "/scores.csv", corpus, slots);
            }
        }
    }
    return results;
}

ExperimentResults run_experiment(const RunConfig& cfg) {
    const PreparedCorpus corpus = prepare_corpus(cfg);
    return run_experiment(cfg, corpus);
}

std::vector<PolicyTiming> timing_report(const RunConfig& cfg) {
    const PreparedCorpus corpus = prepare_corpus(cfg);
    const IncomeFunction income(cfg.income);
    static constexpr Policy kAll[] = {Policy::TopK,   Policy::RandomK,    Policy::FairK,
                                      Policy::FairCo, Policy::MCFair,     Policy::DIDRF,
                                      Policy::DIDRF_WO_h, Policy::DIDRF_WO_p};
    std::vector<PolicyTiming> report;
    report.reserve(std::size(kAll));
    for (Policy p : kAll) {
        PolicyConfig policy{p, cfg.gamma, cfg.eta, cfg.k, cfg.mode};
        const auto slots = simulate_grid_point(cfg, corpus, income, policy, true);
        PolicyTiming timing;
        timing.policy = p;
        std::int64_t nanos = 0;
        for (const TaskResult& task : slots) {
            nanos += task.scoring_nanos;
            timing.sessions += task.sessions;
        }
        timing.scoring_seconds = static_cast<double>(nanos) * 1e-9;
        timing.mean_session_micros =
            timing.sessions > 0
                ? static_cast<double>(nanos) * 1e-3 / static_cast<double>(timing.sessions)
                : 0.0;
        report.push_back(timing);
    }
    return report;
}

void write_outputs(const RunConfig& cfg, const ExperimentResults& results) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);

    {
        std::ofstream out(cfg.output_dir + "/results.csv");
        if (!out) throw DataError("cannot write results.csv in " + cfg.output_dir);
        out << "trial,policy,gamma,eta,cutoff,cndcg_avg,unfairness_income,unfairness_exposure,"
               "wall_time_s\n";
        out.precision(12);
        const auto row = [&](const RunResult& run, const std::string& trial,
                             const TrialMetrics& tm) {
            for (int c = 1; c <= results.max_cutoff; ++c) {
                out << trial << ',' << policy_name(run.policy) << ',' << run.gamma << ','
                    << run.eta << ',' << c << ',' << tm.cndcg[static_cast<std::size_t>(c - 1)]
                    << ',' << tm.unfairness_income << ',' << tm.unfairness_exposure << ','
                    << tm.wall_seconds << '\n';
            }
        };
        for (const RunResult& run : results.runs) {
            for (std::size_t t = 0; t < run.trials.size(); ++t)
                row(run, std::to_string(t), run.trials[t]);
            row(run, "mean", run.mean);
        }
    }

    {
        std::ofstream out(cfg.output_dir + "/frontier.csv");
        if (!out) throw DataError("cannot write frontier.csv in " + cfg.output_dir);
        out << "gamma,eta,cndcg_avg@" << results.max_cutoff << ",unfairness\n";
        out.precision(12);
        for (const RunResult& run : results.runs) {
            out << run.gamma << ',' << run.eta << ','
                << run.mean.cndcg[static_cast<std::size_t>(results.max_cutoff - 1)] << ','
                << run.mean.unfairness_income << '\n';
        }
    }

    {
        nlohmann::json meta;
        meta["config"] = config_to_json(cfg);
        meta["version"] = "0.1.0";
        meta["waveform"] = IncomeFunction::waveform_description();
        std::ofstream out(cfg.output_dir + "/run_meta.json");
        if (!out) throw DataError("cannot write run_meta.json in " + cfg.output_dir);
        out << meta.dump(2) << '\n';
    }
}

void write_timing_csv(const RunConfig& cfg, const std::vector<PolicyTiming>& timings) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream out(cfg.output_dir + "/timing.csv");
    if (!out) throw DataError("cannot write timing.csv in " + cfg.output_dir);
    out << "policy,sessions,scoring_sorting_s,mean_session_us\n";
    out.precision(9);
    for (const PolicyTiming& t : timings) {
        out << policy_name(t.policy) << ',' << t.sessions << ',' << t.scoring_seconds << ','
            << t.mean_session_micros << '\n';
    }
}

std::string validate_run(const RunConfig& cfg) {
    cfg.validate();
    const PreparedCorpus corpus = prepare_corpus(cfg);
    const IncomeFunction income(cfg.income);
    (void)income;
    std::size_t total_items = 0;
    for (const Query& q : corpus.queries.queries) total_items += q.items.size();
    std::ostringstream ss;
    ss << "config ok: " << corpus.queries.queries.size() << " queries, "
       << (static_cast<double>(total_items) /
           static_cast<double>(corpus.queries.queries.size()))
       << " docs/query mean, y_max=" << corpus.queries.y_max << ", policy="
       << policy_name(cfg.policy) << ", mode=" << mode_name(cfg.mode) << ", horizon="
       << cfg.horizon << ", trials=" << cfg.trials;
    return ss.str();
}

}  // namespace didrf
