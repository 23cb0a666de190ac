#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace didrf {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.contains(key))
            throw ConfigError("unknown config key '" + scope + key + "'");
    }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

IncomeKind income_kind_from_name(const std::string& name) {
    if (name == "periodic") return IncomeKind::Periodic;
    if (name == "aperiodic") return IncomeKind::Aperiodic;
    if (name == "constant") return IncomeKind::Constant;
    if (name == "table") return IncomeKind::Table;
    throw ConfigError("income.kind must be periodic|aperiodic|constant|table, got '" + name +
                      "'");
}

std::string income_kind_name(IncomeKind kind) {
    switch (kind) {
        case IncomeKind::Periodic: return "periodic";
        case IncomeKind::Aperiodic: return "aperiodic";
        case IncomeKind::Constant: return "constant";
        case IncomeKind::Table: return "table";
    }
    return "?";
}

DatasetSpec parse_dataset(const json& j) {
    reject_unknown_keys(j,
                        {"type", "path", "y_max", "num_queries", "docs_per_query",
                         "grade_distribution", "seed"},
                        "dataset.");
    DatasetSpec ds;
    std::string type = "synthetic";
    read_field(j, "type", type);
    if (type == "letor")
        ds.type = DatasetSpec::Type::Letor;
    else if (type == "synthetic")
        ds.type = DatasetSpec::Type::Synthetic;
    else
        throw ConfigError("dataset.type must be letor|synthetic, got '" + type + "'");
    read_field(j, "path", ds.path);
    read_field(j, "y_max", ds.y_max);
    read_field(j, "num_queries", ds.num_queries);
    read_field(j, "docs_per_query", ds.docs_per_query);
    read_field(j, "grade_distribution", ds.grade_distribution);
    read_field(j, "seed", ds.seed);
    if (ds.type == DatasetSpec::Type::Letor && ds.path.empty())
        throw ConfigError("dataset.path is required for letor datasets");
    return ds;
}

IncomeSpec parse_income(const json& j, long run_horizon) {
    reject_unknown_keys(
        j, {"kind", "horizon", "peaks", "constant_value", "table", "table_path",
            "per_item_phase"},
        "income.");
    IncomeSpec inc;
    std::string kind = "aperiodic";
    read_field(j, "kind", kind);
    inc.kind = income_kind_from_name(kind);
    inc.horizon = run_horizon;  // waveform horizon tracks the run by default
    read_field(j, "horizon", inc.horizon);
    read_field(j, "peaks", inc.peaks);
    read_field(j, "constant_value", inc.constant_value);
    if (j.contains("table") && j.contains("table_path"))
        throw ConfigError("income.table and income.table_path are mutually exclusive");
    if (j.contains("table")) read_field(j, "table", inc.table);
    if (j.contains("table_path")) {
        std::string path;
        read_field(j, "table_path", path);
        inc.table = load_income_table_csv(path);
    }
    if (j.contains("per_item_phase")) {
        const json& phases = j.at("per_item_phase");
        if (!phases.is_object()) throw ConfigError("income.per_item_phase must be an object");
        for (const auto& [item, offset] : phases.items()) {
            if (!offset.is_number_integer())
                throw ConfigError("income.per_item_phase['" + item + "'] must be an integer");
            inc.per_item_phase[item] = offset.get<long>();
        }
    }
    return inc;
}

SweepSpec parse_sweep(const json& j) {
    reject_unknown_keys(j, {"gammas", "etas"}, "sweep.");
    SweepSpec sweep;
    read_field(j, "gammas", sweep.gammas);
    read_field(j, "etas", sweep.etas);
    if (sweep.gammas.empty()) throw ConfigError("sweep.gammas must be a non-empty list");
    return sweep;
}

}  // namespace

RunConfig parse_config_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(j,
                        {"dataset", "income", "policy", "mode", "gamma", "eta", "horizon", "k_c",
                         "k", "epsilon", "alpha", "trials", "base_seed", "sweep",
                         "session_allocation", "output_dir", "threads", "log_sessions",
                         "log_scores"},
                        "");
    RunConfig cfg;
    read_field(j, "horizon", cfg.horizon);
    if (j.contains("dataset")) cfg.dataset = parse_dataset(j.at("dataset"));
    if (j.contains("income")) cfg.income = parse_income(j.at("income"), cfg.horizon);
    else cfg.income.horizon = cfg.horizon;
    if (j.contains("policy")) {
        std::string name;
        read_field(j, "policy", name);
        cfg.policy = policy_from_name(name);
    }
    if (j.contains("mode")) {
        std::string name;
        read_field(j, "mode", name);
        cfg.mode = mode_from_name(name);
    }
    read_field(j, "gamma", cfg.gamma);
    read_field(j, "eta", cfg.eta);
    read_field(j, "k_c", cfg.k_c);
    read_field(j, "k", cfg.k);
    read_field(j, "epsilon", cfg.epsilon);
    read_field(j, "alpha", cfg.alpha);
    read_field(j, "trials", cfg.trials);
    read_field(j, "base_seed", cfg.base_seed);
    if (j.contains("sweep")) cfg.sweep = parse_sweep(j.at("sweep"));
    if (j.contains("session_allocation")) {
        std::string name;
        read_field(j, "session_allocation", name);
        if (name == "per_query")
            cfg.session_allocation = SessionAllocation::PerQuery;
        else if (name == "shared_clock")
            cfg.session_allocation = SessionAllocation::SharedClock;
        else
            throw ConfigError("session_allocation must be per_query|shared_clock, got '" + name +
                              "'");
    }
    read_field(j, "output_dir", cfg.output_dir);
    read_field(j, "threads", cfg.threads);
    read_field(j, "log_sessions", cfg.log_sessions);
    read_field(j, "log_scores", cfg.log_scores);
    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config_json(j);
}

void RunConfig::validate() const {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (k_c < 1) throw ConfigError("k_c must be >= 1");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in [0,1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must be in (0,1]");
    if (!std::isfinite(gamma) || gamma < 0.0) throw ConfigError("gamma must be finite and >= 0");
    if (!std::isfinite(eta) || eta < 0.0) throw ConfigError("eta must be finite and >= 0");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    if (dataset.type == DatasetSpec::Type::Synthetic) {
        if (dataset.docs_per_query < 2) throw ConfigError("dataset.docs_per_query must be >= 2");
        if (dataset.num_queries < 1) throw ConfigError("dataset.num_queries must be >= 1");
        if (dataset.docs_per_query < k)
            throw ConfigError("k exceeds dataset.docs_per_query");
    }
    if (sweep) {
        for (double g : sweep->gammas)
            if (!std::isfinite(g) || g < 0.0)
                throw ConfigError("sweep.gammas entries must be finite and >= 0");
        for (double e : sweep->etas)
            if (!std::isfinite(e) || e < 0.0)
                throw ConfigError("sweep.etas entries must be finite and >= 0");
    }
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    json dataset;
    if (cfg.dataset.type == DatasetSpec::Type::Letor) {
        dataset = {{"type", "letor"}, {"path", cfg.dataset.path}, {"y_max", cfg.dataset.y_max}};
    } else {
        dataset = {{"type", "synthetic"},
                   {"num_queries", cfg.dataset.num_queries},
                   {"docs_per_query", cfg.dataset.docs_per_query},
                   {"grade_distribution", cfg.dataset.grade_distribution},
                   {"seed", cfg.dataset.seed}};
    }
    json income = {{"kind", income_kind_name(cfg.income.kind)},
                   {"horizon", cfg.income.horizon}};
    if (cfg.income.kind == IncomeKind::Periodic) income["peaks"] = cfg.income.peaks;
    if (cfg.income.kind == IncomeKind::Constant)
        income["constant_value"] = cfg.income.constant_value;
    if (cfg.income.kind == IncomeKind::Table) income["table"] = cfg.income.table;
    if (!cfg.income.per_item_phase.empty()) {
        json phases = json::object();
        for (const auto& [item, offset] : cfg.income.per_item_phase) phases[item] = offset;
        income["per_item_phase"] = phases;
    }
    json j = {{"dataset", dataset},
              {"income", income},
              {"policy", std::string(policy_name(cfg.policy))},
              {"mode", std::string(mode_name(cfg.mode))},
              {"gamma", cfg.gamma},
              {"eta", cfg.eta},
              {"horizon", cfg.horizon},
              {"k_c", cfg.k_c},
              {"k", cfg.k},
              {"epsilon", cfg.epsilon},
              {"alpha", cfg.alpha},
              {"trials", cfg.trials},
              {"base_seed", cfg.base_seed},
              {"session_allocation", cfg.session_allocation == SessionAllocation::PerQuery
                                         ? "per_query"
                                         : "shared_clock"},
              {"output_dir", cfg.output_dir},
              {"threads", cfg.threads},
              {"log_sessions", cfg.log_sessions},
              {"log_scores", cfg.log_scores}};
    if (cfg.sweep) j["sweep"] = {{"gammas", cfg.sweep->gammas}, {"etas", cfg.sweep->etas}};
    return j;
}

std::vector<double> load_income_table_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open income table: " + path);
    std::vector<double> values;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;
        try {
            std::size_t pos = 0;
            const double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            values.push_back(v);
        } catch (const std::exception&) {
            throw ParseError("malformed income value '" + tok + "'", line_no);
        }
    }
    if (values.empty()) throw DataError("income table is empty: " + path);
    return values;
}

}  // namespace didrf
