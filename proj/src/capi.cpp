#include "didrf.h"

#include <cmath>
#include <cstring>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "ledger.hpp"
#include "metrics.hpp"
#include "rankers.hpp"
#include "usermodel.hpp"

namespace {

thread_local std::string g_last_error;

struct LabState {
    didrf::RunConfig config;
    std::string error;
    didrf::ExperimentResults results;
    bool has_results = false;
};

didrf_status status_from_exception(std::string* sink) {
    try {
        throw;
    } catch (const didrf::ConfigError& e) {
        if (sink) *sink = e.what();
        return DIDRF_ERROR_CONFIG;
    } catch (const didrf::DataError& e) {
        if (sink) *sink = e.what();
        return DIDRF_ERROR_DATA;
    } catch (const std::exception& e) {
        if (sink) *sink = e.what();
        return DIDRF_ERROR_RUNTIME;
    } catch (...) {
        if (sink) *sink = "unknown error";
        return DIDRF_ERROR_RUNTIME;
    }
}

template <typename Fn>
didrf_status guarded(didrf_lab* lab, Fn&& fn);

}  // namespace

struct didrf_lab : LabState {};

namespace {

template <typename Fn>
didrf_status guarded(didrf_lab* lab, Fn&& fn) {
    if (!lab) return DIDRF_ERROR_INVALID_ARGUMENT;
    lab->error.clear();
    try {
        fn();
        return DIDRF_OK;
    } catch (...) {
        return status_from_exception(&lab->error);
    }
}

}  // namespace

extern "C" {

const char* didrf_version(void) { return "0.1.0"; }

const char* didrf_last_error(void) { return g_last_error.c_str(); }

didrf_status didrf_lab_open(const char* config_path, didrf_lab** out_lab) {
    if (!config_path || !out_lab) return DIDRF_ERROR_INVALID_ARGUMENT;
    *out_lab = nullptr;
    try {
        auto lab = new didrf_lab;
        lab->config = didrf::load_config_file(config_path);
        *out_lab = lab;
        return DIDRF_OK;
    } catch (...) {
        return status_from_exception(&g_last_error);
    }
}

didrf_status didrf_lab_open_json(const char* config_json, didrf_lab** out_lab) {
    if (!config_json || !out_lab) return DIDRF_ERROR_INVALID_ARGUMENT;
    *out_lab = nullptr;
    try {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(config_json);
        } catch (const nlohmann::json::exception& e) {
            throw didrf::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        auto lab = new didrf_lab;
        try {
            lab->config = didrf::parse_config_json(j);
        } catch (...) {
            delete lab;
            throw;
        }
        *out_lab = lab;
        return DIDRF_OK;
    } catch (...) {
        return status_from_exception(&g_last_error);
    }
}

void didrf_lab_close(didrf_lab* lab) { delete lab; }

const char* didrf_lab_error_message(const didrf_lab* lab) {
    return lab ? lab->error.c_str() : "";
}

didrf_status didrf_lab_set_policy(didrf_lab* lab, const char* policy) {
    if (!policy) return DIDRF_ERROR_INVALID_ARGUMENT;
    return guarded(lab, [&] { lab->config.policy = didrf::policy_from_name(policy); });
}

didrf_status didrf_lab_set_gamma(didrf_lab* lab, double gamma) {
    return guarded(lab, [&] {
        lab->config.gamma = gamma;
        lab->config.validate();
    });
}

didrf_status didrf_lab_set_eta(didrf_lab* lab, double eta) {
    return guarded(lab, [&] {
        lab->config.eta = eta;
        lab->config.validate();
    });
}

didrf_status didrf_lab_set_trials(didrf_lab* lab, int trials) {
    return guarded(lab, [&] {
        lab->config.trials = trials;
        lab->config.validate();
    });
}

didrf_status didrf_lab_set_seed(didrf_lab* lab, unsigned long long base_seed) {
    return guarded(lab, [&] { lab->config.base_seed = base_seed; });
}

didrf_status didrf_lab_set_output_dir(didrf_lab* lab, const char* dir) {
    if (!dir) return DIDRF_ERROR_INVALID_ARGUMENT;
    return guarded(lab, [&] {
        lab->config.output_dir = dir;
        lab->config.validate();
    });
}

didrf_status didrf_lab_validate(didrf_lab* lab, char* summary, size_t summary_len) {
    return guarded(lab, [&] {
        const std::string text = didrf::validate_run(lab->config);
        if (summary && summary_len > 0) {
            const std::size_t n = std::min(summary_len - 1, text.size());
            std::memcpy(summary, text.data(), n);
            summary[n] = '\0';
        }
    });
}

didrf_status didrf_lab_run(didrf_lab* lab) {
    return guarded(lab, [&] {
        lab->results = didrf::run_experiment(lab->config);
        lab->has_results = true;
        didrf::write_outputs(lab->config, lab->results);
    });
}

didrf_status didrf_lab_sweep(didrf_lab* lab) {
    return guarded(lab, [&] {
        if (!lab->config.sweep)
            throw didrf::ConfigError("sweep requires a 'sweep' section in the config");
        lab->results = didrf::run_experiment(lab->config);
        lab->has_results = true;
        didrf::write_outputs(lab->config, lab->results);
    });
}

didrf_status didrf_lab_timing(didrf_lab* lab) {
    return guarded(lab, [&] {
        const auto report = didrf::timing_report(lab->config);
        didrf::write_timing_csv(lab->config, report);
    });
}

didrf_status didrf_lab_result_count(const didrf_lab* lab, size_t* out_count) {
    if (!lab || !out_count) return DIDRF_ERROR_INVALID_ARGUMENT;
    if (!lab->has_results) return DIDRF_ERROR_RUNTIME;
    *out_count = lab->results.runs.size();
    return DIDRF_OK;
}

didrf_status didrf_lab_result_unfairness(const didrf_lab* lab, size_t index, double* out) {
    if (!lab || !out) return DIDRF_ERROR_INVALID_ARGUMENT;
    if (!lab->has_results || index >= lab->results.runs.size())
        return DIDRF_ERROR_INVALID_ARGUMENT;
    *out = lab->results.runs[index].mean.unfairness_income;
    return DIDRF_OK;
}

didrf_status didrf_lab_result_cndcg(const didrf_lab* lab, size_t index, int cutoff, double* out) {
    if (!lab || !out) return DIDRF_ERROR_INVALID_ARGUMENT;
    if (!lab->has_results || index >= lab->results.runs.size())
        return DIDRF_ERROR_INVALID_ARGUMENT;
    if (cutoff < 1 || cutoff > lab->results.max_cutoff) return DIDRF_ERROR_INVALID_ARGUMENT;
    *out = lab->results.runs[index].mean.cndcg[static_cast<std::size_t>(cutoff - 1)];
    return DIDRF_OK;
}

didrf_status didrf_lab_result_point(const didrf_lab* lab, size_t index, double* out_gamma,
                                    double* out_eta) {
    if (!lab || !out_gamma || !out_eta) return DIDRF_ERROR_INVALID_ARGUMENT;
    if (!lab->has_results || index >= lab->results.runs.size())
        return DIDRF_ERROR_INVALID_ARGUMENT;
    *out_gamma = lab->results.runs[index].gamma;
    *out_eta = lab->results.runs[index].eta;
    return DIDRF_OK;
}

double didrf_relevance_probability(int grade, int y_max, double epsilon) {
    try {
        return didrf::relevance_probability(grade, y_max, epsilon);
    } catch (...) {
        return NAN;
    }
}

double didrf_examination_probability(int rank, int k_c) {
    try {
        return didrf::examination_probability(rank, k_c);
    } catch (...) {
        return NAN;
    }
}

double didrf_uncertainty_gain(double exposure_with_prior) {
    try {
        return didrf::uncertainty_gain_at(exposure_with_prior);
    } catch (...) {
        return NAN;
    }
}

double didrf_sigma_coefficient(size_t num_items) {
    try {
        return didrf::sigma_coefficient(num_items);
    } catch (...) {
        return NAN;
    }
}

double didrf_pairwise_unfairness(const double* value, const double* relevance, size_t n) {
    if (!value || !relevance) return NAN;
    try {
        return didrf::pairwise_unfairness(std::span<const double>(value, n),
                                          std::span<const double>(relevance, n));
    } catch (...) {
        return NAN;
    }
}

}  // extern "C"
