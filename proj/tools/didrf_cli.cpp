// Command-line front end for the fair-ranking simulation lab. Talks to the
// shared library strictly through the C API.

#include <didrf.h>

#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::string> policy;
    std::optional<double> gamma;
    std::optional<double> eta;
    std::optional<int> trials;
    std::optional<unsigned long long> seed;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_overrides) {
    cmd->add_option("--config", opts.config_path, "Path to the JSON run configuration")
        ->required();
    if (!with_overrides) return;
    cmd->add_option("--policy", opts.policy,
                    "Override policy (RandomK|TopK|FairK|FairCo|MCFair|DIDRF|DIDRF_WO_h|"
                    "DIDRF_WO_p)");
    cmd->add_option("--gamma", opts.gamma, "Override the fairness trade-off gamma");
    cmd->add_option("--eta", opts.eta, "Override the uncertainty trade-off eta");
    cmd->add_option("--trials", opts.trials, "Override the trial count");
    cmd->add_option("--seed", opts.seed, "Override the base seed");
    cmd->add_option("--out", opts.out_dir, "Override the output directory");
}

int fail(const char* stage, didrf_status status, const char* message) {
    std::fprintf(stderr, "didrf: %s failed: %s\n", stage,
                 message && *message ? message : "unknown error");
    // Config and data problems keep their dedicated exit codes.
    if (status == DIDRF_ERROR_CONFIG || status == DIDRF_ERROR_DATA) return status;
    return 1;
}

class Lab {
public:
    ~Lab() { didrf_lab_close(lab_); }

    int open(const CommonOpts& opts) {
        didrf_status st = didrf_lab_open(opts.config_path.c_str(), &lab_);
        if (st != DIDRF_OK) return fail("loading config", st, didrf_last_error());
        if (opts.policy && (st = didrf_lab_set_policy(lab_, opts.policy->c_str())) != DIDRF_OK)
            return fail("--policy", st, didrf_lab_error_message(lab_));
        if (opts.gamma && (st = didrf_lab_set_gamma(lab_, *opts.gamma)) != DIDRF_OK)
            return fail("--gamma", st, didrf_lab_error_message(lab_));
        if (opts.eta && (st = didrf_lab_set_eta(lab_, *opts.eta)) != DIDRF_OK)
            return fail("--eta", st, didrf_lab_error_message(lab_));
        if (opts.trials && (st = didrf_lab_set_trials(lab_, *opts.trials)) != DIDRF_OK)
            return fail("--trials", st, didrf_lab_error_message(lab_));
        if (opts.seed && (st = didrf_lab_set_seed(lab_, *opts.seed)) != DIDRF_OK)
            return fail("--seed", st, didrf_lab_error_message(lab_));
        if (opts.out_dir && (st = didrf_lab_set_output_dir(lab_, opts.out_dir->c_str())) !=
                                DIDRF_OK)
            return fail("--out", st, didrf_lab_error_message(lab_));
        return 0;
    }

    didrf_lab* get() { return lab_; }

private:
    didrf_lab* lab_ = nullptr;
};

int print_summary(didrf_lab* lab) {
    size_t count = 0;
    if (didrf_lab_result_count(lab, &count) != DIDRF_OK) return 0;
    for (size_t i = 0; i < count; ++i) {
        double gamma = 0, eta = 0, unfairness = 0, cndcg = 0;
        didrf_lab_result_point(lab, i, &gamma, &eta);
        didrf_lab_result_unfairness(lab, i, &unfairness);
        int cutoff = 5;
        while (cutoff > 1 && didrf_lab_result_cndcg(lab, i, cutoff, &cndcg) != DIDRF_OK)
            --cutoff;
        didrf_lab_result_cndcg(lab, i, cutoff, &cndcg);
        std::printf("gamma=%g eta=%g  cndcg_avg@%d=%.6f  unfairness=%.6g\n", gamma, eta, cutoff,
                    cndcg, unfairness);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"didrf: income-fairness ranking simulation lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", didrf_version());

    CommonOpts run_opts, sweep_opts, timing_opts, validate_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "Simulate one configured run");
    add_common(run_cmd, run_opts, true);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Simulate the configured gamma/eta grid");
    add_common(sweep_cmd, sweep_opts, true);
    CLI::App* timing_cmd = app.add_subcommand("timing", "Measure per-policy scoring cost");
    add_common(timing_cmd, timing_opts, true);
    CLI::App* validate_cmd = app.add_subcommand("validate", "Check a config and its dataset");
    add_common(validate_cmd, validate_opts, false);

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        Lab lab;
        if (int rc = lab.open(run_opts)) return rc;
        const didrf_status st = didrf_lab_run(lab.get());
        if (st != DIDRF_OK) return fail("run", st, didrf_lab_error_message(lab.get()));
        print_summary(lab.get());
        std::printf("wrote results.csv, frontier.csv, run_meta.json\n");
        return 0;
    }
    if (sweep_cmd->parsed()) {
        Lab lab;
        if (int rc = lab.open(sweep_opts)) return rc;
        const didrf_status st = didrf_lab_sweep(lab.get());
        if (st != DIDRF_OK) return fail("sweep", st, didrf_lab_error_message(lab.get()));
        print_summary(lab.get());
        std::printf("wrote results.csv, frontier.csv, run_meta.json\n");
        return 0;
    }
    if (timing_cmd->parsed()) {
        Lab lab;
        if (int rc = lab.open(timing_opts)) return rc;
        const didrf_status st = didrf_lab_timing(lab.get());
        if (st != DIDRF_OK) return fail("timing", st, didrf_lab_error_message(lab.get()));
        std::printf("wrote timing.csv\n");
        return 0;
    }
    if (validate_cmd->parsed()) {
        Lab lab;
        if (int rc = lab.open(validate_opts)) return rc;
        char summary[512];
        const didrf_status st = didrf_lab_validate(lab.get(), summary, sizeof(summary));
        if (st != DIDRF_OK) return fail("validate", st, didrf_lab_error_message(lab.get()));
        std::printf("%s\n", summary);
        return 0;
    }
    return 1;
}
