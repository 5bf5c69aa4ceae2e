#include "nvred/counters.hpp"

#include <algorithm>
#include <stdexcept>

namespace nvred {

EnergyTimingModel EnergyTimingModel::defaults() {
    EnergyTimingModel m;
    auto set = [&m](SimEvent ev, double cycles_or_ns, bool is_ns, double pj) {
        m.latency_ns[size_t(ev)] = is_ns ? cycles_or_ns : cycles_or_ns * m.cycle_ns;
        m.energy_pj[size_t(ev)] = pj;
    };
    set(SimEvent::L1Hit, 4, false, 15);
    set(SimEvent::L1Miss, 0, false, 33);
    set(SimEvent::L2Hit, 7, false, 46);
    set(SimEvent::L2Miss, 0, false, 94);
    set(SimEvent::LlcHit, 27, false, 240);
    set(SimEvent::LlcMiss, 0, false, 500);
    set(SimEvent::CtrlCacheHit, 1, false, 15);
    set(SimEvent::CtrlCacheMiss, 0, false, 33);
    set(SimEvent::NvmDataRead, 60, true, 1600);
    set(SimEvent::NvmDataWrite, 150, true, 9000);
    set(SimEvent::NvmRedundancyRead, 60, true, 1600);
    set(SimEvent::NvmRedundancyWrite, 150, true, 9000);
    set(SimEvent::RangeMatch, 2, false, 0);
    set(SimEvent::ChecksumCompute, 1, false, 0);
    return m;
}

uint64_t AccessCounters::total(SimEvent ev) const {
    uint64_t sum = 0;
    for (const auto& row : per_thread_) sum += row[size_t(ev)];
    return sum;
}

AccessCounters& AccessCounters::operator+=(const AccessCounters& other) {
    if (other.per_thread_.size() != per_thread_.size())
        throw std::invalid_argument("AccessCounters: thread count mismatch");
    for (size_t t = 0; t < per_thread_.size(); ++t)
        for (size_t e = 0; e < kSimEventCount; ++e)
            per_thread_[t][e] += other.per_thread_[t][e];
    return *this;
}

AccessCounters& AccessCounters::operator-=(const AccessCounters& earlier) {
    if (earlier.per_thread_.size() != per_thread_.size())
        throw std::invalid_argument("AccessCounters: thread count mismatch");
    for (size_t t = 0; t < per_thread_.size(); ++t)
        for (size_t e = 0; e < kSimEventCount; ++e) {
            if (earlier.per_thread_[t][e] > per_thread_[t][e])
                throw std::invalid_argument("AccessCounters: subtrahend is not an earlier snapshot");
            per_thread_[t][e] -= earlier.per_thread_[t][e];
        }
    return *this;
}

Accrual accrue(const AccessCounters& counters, const EnergyTimingModel& model) {
    Accrual out;
    for (uint32_t t = 0; t < counters.threads(); ++t) {
        double thread_ns = 0;
        for (size_t e = 0; e < kSimEventCount; ++e) {
            uint64_t n = counters.of_thread(t, SimEvent(e));
            if (!n) continue;
            thread_ns += double(n) * model.latency_ns[e];
            out.energy_joules += double(n) * model.energy_pj[e] * 1e-12;
        }
        out.model_runtime_ns = std::max(out.model_runtime_ns, thread_ns);
    }
    return out;
}

}  // namespace nvred
