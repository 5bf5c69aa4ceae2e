// counters.hpp - Per-thread event accounting and the energy/latency model.
//
// Every countable simulation event is attributed to the logical thread whose
// access caused it (evictions and controller work charge the thread that
// triggered them). Energy is a linear functional of the global counts;
// model runtime is, per thread, the serialized sum of the latencies of the
// events that serviced its accesses, reported as the maximum across threads.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace nvred {

enum class SimEvent : uint8_t {
    L1Hit,
    L1Miss,
    L2Hit,
    L2Miss,
    LlcHit,
    LlcMiss,
    CtrlCacheHit,
    CtrlCacheMiss,
    NvmDataRead,
    NvmDataWrite,
    NvmRedundancyRead,
    NvmRedundancyWrite,
    RangeMatch,
    ChecksumCompute,
};
inline constexpr size_t kSimEventCount = 14;

struct EnergyTimingModel {
    double cycle_ns = 1.0 / 2.27;  // 2.27 GHz core clock
    std::array<double, kSimEventCount> latency_ns{};
    std::array<double, kSimEventCount> energy_pj{};

    // Simulation-parameter table defaults: L1 15/33 pJ per hit/miss and
    // 4-cycle hits, L2 46/94 pJ and 7 cycles, LLC 240/500 pJ and 27 cycles,
    // on-controller cache 15/33 pJ and 1 cycle, NVM 1.6/9 nJ and 60/150 ns,
    // 2 cycles per address range match, 1 cycle per checksum computation.
    // Misses carry energy only; the latency lands on the servicing level.
    static EnergyTimingModel defaults();
};

class AccessCounters {
public:
    explicit AccessCounters(uint32_t threads = 1) : per_thread_(threads) {}

    void record(uint32_t thread, SimEvent ev, uint64_t n = 1) {
        per_thread_[thread][size_t(ev)] += n;
    }

    uint32_t threads() const { return per_thread_.size(); }
    uint64_t of_thread(uint32_t thread, SimEvent ev) const {
        return per_thread_[thread][size_t(ev)];
    }
    uint64_t total(SimEvent ev) const;

    uint64_t l1_hits() const { return total(SimEvent::L1Hit); }
    uint64_t l1_misses() const { return total(SimEvent::L1Miss); }
    uint64_t l2_hits() const { return total(SimEvent::L2Hit); }
    uint64_t l2_misses() const { return total(SimEvent::L2Miss); }
    uint64_t llc_hits() const { return total(SimEvent::LlcHit); }
    uint64_t llc_misses() const { return total(SimEvent::LlcMiss); }
    uint64_t on_controller_hits() const { return total(SimEvent::CtrlCacheHit); }
    uint64_t on_controller_misses() const { return total(SimEvent::CtrlCacheMiss); }
    uint64_t nvm_data_reads() const { return total(SimEvent::NvmDataRead); }
    uint64_t nvm_data_writes() const { return total(SimEvent::NvmDataWrite); }
    uint64_t nvm_redundancy_reads() const { return total(SimEvent::NvmRedundancyRead); }
    uint64_t nvm_redundancy_writes() const { return total(SimEvent::NvmRedundancyWrite); }

    uint64_t nvm_reads() const { return nvm_data_reads() + nvm_redundancy_reads(); }
    uint64_t nvm_writes() const { return nvm_data_writes() + nvm_redundancy_writes(); }
    uint64_t nvm_total() const { return nvm_reads() + nvm_writes(); }
    uint64_t cache_accesses() const {
        return l1_hits() + l1_misses() + l2_hits() + l2_misses() + llc_hits() +
               llc_misses() + on_controller_hits() + on_controller_misses();
    }

    AccessCounters& operator+=(const AccessCounters& other);
    // Difference of two snapshots of one monotone counter stream.
    AccessCounters& operator-=(const AccessCounters& earlier);
    friend AccessCounters operator-(AccessCounters later, const AccessCounters& earlier) {
        later -= earlier;
        return later;
    }
    bool operator==(const AccessCounters& other) const { return per_thread_ == other.per_thread_; }

private:
    std::vector<std::array<uint64_t, kSimEventCount>> per_thread_;
};

struct Accrual {
    double energy_joules = 0;
    double model_runtime_ns = 0;
};

Accrual accrue(const AccessCounters& counters, const EnergyTimingModel& model);

}  // namespace nvred
