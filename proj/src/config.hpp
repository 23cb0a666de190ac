#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "income.hpp"
#include "rankers.hpp"

#include "json.hpp"

namespace didrf {

struct DatasetSpec {
    enum class Type { Letor, Synthetic };
    Type type = Type::Synthetic;
    // letor
    std::string path;
    int y_max = 4;
    // synthetic
    int num_queries = 50;
    int docs_per_query = 20;
    std::vector<double> grade_distribution = {0.2, 0.2, 0.2, 0.2, 0.2};
    std::uint64_t seed = 1;
};

struct SweepSpec {
    std::vector<double> gammas;
    std::vector<double> etas;
};

// How sessions are allotted over the horizon.
//   PerQuery    every query runs one session at each timestep 1..horizon
//   SharedClock one global clock; timestep n serves query (n-1) mod |Q|, so
//               each query sees ~horizon/|Q| sessions at its global times
enum class SessionAllocation { PerQuery, SharedClock };

// One declarative run. JSON field names mirror the struct members; unknown
// keys are rejected.
struct RunConfig {
    DatasetSpec dataset;
    IncomeSpec income;
    Policy policy = Policy::DIDRF;
    Mode mode = Mode::Offline;
    double gamma = 0.0;
    double eta = 0.0;
    long horizon = 10000;
    int k_c = 5;
    int k = 5;
    double epsilon = 0.1;
    double alpha = 0.995;
    int trials = 5;
    std::uint64_t base_seed = 42;
    std::optional<SweepSpec> sweep;
    SessionAllocation session_allocation = SessionAllocation::PerQuery;
    std::string output_dir = "out";
    int threads = 0;  // 0 = hardware concurrency
    bool log_sessions = false;
    bool log_scores = false;

    void validate() const;  // throws ConfigError with the offending field
};

RunConfig parse_config_json(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

// One-column CSV of income values for the table kind.
std::vector<double> load_income_table_csv(const std::string& path);

}  // namespace didrf
