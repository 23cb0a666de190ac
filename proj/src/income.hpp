#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace didrf {

enum class IncomeKind { Periodic, Aperiodic, Constant, Table };

// Declarative description of the unit-income-per-unit-exposure function
// f_d(t). All items share the function unless per_item_phase is set.
struct IncomeSpec {
    IncomeKind kind = IncomeKind::Aperiodic;
    long horizon = 10000;
    int peaks = 100;              // periodic only
    double constant_value = 1.0;  // constant only
    std::vector<double> table;    // table only
    std::unordered_map<std::string, long> per_item_phase;
};

// Prepared evaluator. For the periodic kind the min-max normalization bounds
// over the horizon grid {0..horizon-1} are computed once at construction, so
// evaluated values land in [0,1] with the grid min at exactly 0 and max at
// exactly 1.
//
// Waveforms:
//   aperiodic  exp(-t/horizon); 1 at t=0, e^-1 at t=horizon, clamped beyond
//   periodic   square wave of `peaks` evenly spaced peaks plus a linear ramp
//              0.5*t/horizon, min-max normalized; wraps modulo horizon
//   constant   constant_value
//   table      exact lookup, no interpolation
class IncomeFunction {
public:
    explicit IncomeFunction(IncomeSpec spec);

    double at(long t) const { return at_phased(t, 0); }
    double at_phased(long t, long phase) const;

    // Item phase offset (0 when per_item_phase is absent or lacks the id).
    long phase_of(const std::string& item_id) const;
    bool has_phases() const { return !spec_.per_item_phase.empty(); }

    const IncomeSpec& spec() const { return spec_; }

    // Text form of the periodic waveform, recorded in run metadata.
    static std::string waveform_description();

private:
    double raw_periodic(long t) const;

    IncomeSpec spec_;
    double periodic_min_ = 0.0;
    double periodic_range_ = 1.0;
};

}  // namespace didrf
