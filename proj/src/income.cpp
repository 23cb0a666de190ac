#include "income.hpp"

#include <cmath>
#include <stdexcept>

#include "errors.hpp"

namespace didrf {

IncomeFunction::IncomeFunction(IncomeSpec spec) : spec_(std::move(spec)) {
    if (spec_.horizon < 1) throw ConfigError("income: horizon must be >= 1");
    if (spec_.kind == IncomeKind::Periodic) {
        if (spec_.peaks < 1) throw ConfigError("income: peaks must be >= 1");
        if (spec_.peaks > spec_.horizon) throw ConfigError("income: peaks must be <= horizon");
        double lo = raw_periodic(0);
        double hi = lo;
        for (long t = 1; t < spec_.horizon; ++t) {
            const double v = raw_periodic(t);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        periodic_min_ = lo;
        periodic_range_ = hi - lo;
    }
    if (spec_.kind == IncomeKind::Table) {
        if (spec_.table.empty()) throw ConfigError("income: table kind needs a non-empty table");
        for (double v : spec_.table)
            if (!std::isfinite(v)) throw ConfigError("income: non-finite table entry");
    }
}

double IncomeFunction::raw_periodic(long t) const {
    const double period = static_cast<double>(spec_.horizon) / spec_.peaks;
    const double square = std::fmod(static_cast<double>(t), period) < period / 2.0 ? 1.0 : 0.0;
    const double ramp = 0.5 * static_cast<double>(t) / static_cast<double>(spec_.horizon);
    return square + ramp;
}

double IncomeFunction::at_phased(long t, long phase) const {
    if (t < 0) throw std::domain_error("income: timestep must be >= 0");
    if (phase != 0) t = ((t + phase) % spec_.horizon + spec_.horizon) % spec_.horizon;

    switch (spec_.kind) {
        case IncomeKind::Aperiodic: {
            const long tt = std::min(t, spec_.horizon);  // clamp beyond the horizon
            return std::exp(-static_cast<double>(tt) / static_cast<double>(spec_.horizon));
        }
        case IncomeKind::Periodic: {
            const long tt = t % spec_.horizon;  // wrap beyond the horizon
            if (periodic_range_ <= 0.0) return 0.0;
            return (raw_periodic(tt) - periodic_min_) / periodic_range_;
        }
        case IncomeKind::Constant:
            return spec_.constant_value;
        case IncomeKind::Table:
            if (static_cast<std::size_t>(t) >= spec_.table.size())
                throw std::domain_error("income: timestep beyond table length");
            return spec_.table[static_cast<std::size_t>(t)];
    }
    throw std::logic_error("income: unknown kind");
}

long IncomeFunction::phase_of(const std::string& item_id) const {
    const auto it = spec_.per_item_phase.find(item_id);
    return it == spec_.per_item_phase.end() ? 0 : it->second;
}

std::string IncomeFunction::waveform_description() {
    return "periodic: sq(t) + 0.5*t/horizon with sq(t)=1 if mod(t,horizon/peaks)<horizon/(2*peaks) "
           "else 0, min-max normalized over t in [0,horizon); aperiodic: exp(-t/horizon)";
}

}  // namespace didrf
