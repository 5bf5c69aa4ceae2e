// machine.hpp - The simulated machine: per-thread L1/L2, shared inclusive
// LLC, the redundancy controller, and the NVM DIMM array. Drives loads and
// stores through the hierarchy with write-allocate/write-back semantics and
// deterministic eviction handling, and splits counters into setup, measure
// and teardown phases.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nvred/controller.hpp"
#include "nvred/counters.hpp"
#include "nvred/hierarchy.hpp"
#include "nvred/layout.hpp"
#include "nvred/nvm.hpp"

namespace nvred {

struct MachineConfig {
    CacheLevelConfig l1;
    CacheLevelConfig l2;
    CacheLevelConfig llc;
    WayPartitionPlan llc_plan{2, 1};
    ControllerConfig controller;
    NvmConfig nvm;
    uint32_t threads = 12;

    // Simulation-parameter table defaults.
    static MachineConfig defaults();
    EnergyTimingModel timing() const;
    void validate() const;
};

enum class Phase : uint8_t { Setup, Measure, Teardown };

class Machine {
public:
    explicit Machine(const MachineConfig& cfg,
                     std::vector<FaultScheduleEntry> faults = {});

    const MachineConfig& config() const { return cfg_; }
    const RedundancyLayout& layout() const { return layout_; }
    NvmDevice& device() { return nvm_; }
    CacheHierarchy& hierarchy() { return hier_; }
    RedundancyController& controller() { return ctrl_; }

    void map_file(uint64_t first_logical_page, uint64_t page_count) {
        ctrl_.map_file(first_logical_page, page_count, 0);
    }
    void unmap_file(uint64_t first_logical_page) { ctrl_.unmap_file(first_logical_page, 0); }
    void unmap_all() { ctrl_.unmap_all(0); }

    // One load or store of a full line. A transaction boundary triggers the
    // software baselines' commit.
    void access(uint32_t thread, bool is_store, uint64_t line_addr,
                const CacheLine& payload = CacheLine{}, bool txn_boundary = false);

    // Write back everything dirty and empty every cache.
    void drain();

    // Freshest architectural value of a line (caches first, then media).
    CacheLine value_of(uint64_t line_addr) const;

    void set_phase(Phase p);
    Phase phase() const { return phase_; }
    const AccessCounters& counters_total() const { return counters_; }
    AccessCounters counters(Phase p) const;

    uint64_t ordinal() const { return ordinal_; }

    // Exhaustive per-event invariant checking (inclusivity, partition
    // classes); for debug runs and tests.
    void set_invariant_checks(bool on) { invariant_checks_ = on; }
    bool invariants_ok() const { return invariants_ok_; }
    bool check_invariants() const;

private:
    void access_inner(uint32_t thread, bool is_store, uint64_t addr, const CacheLine& payload);
    void install_l1(uint32_t t, uint64_t addr, const CacheLine& content);
    void install_l2(uint32_t t, uint64_t addr, const CacheLine& content, bool dirty);
    void install_llc(uint64_t addr, const CacheLine& content, uint32_t t);

    MachineConfig cfg_;
    RedundancyLayout layout_;
    AccessCounters counters_;
    NvmDevice nvm_;
    CacheHierarchy hier_;
    RedundancyController ctrl_;
    uint64_t ordinal_ = 0;
    Phase phase_ = Phase::Setup;
    AccessCounters setup_end_;
    AccessCounters measure_end_;
    bool invariant_checks_ = false;
    bool invariants_ok_ = true;
};

}  // namespace nvred
