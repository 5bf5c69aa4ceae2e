#include "nvred/machine.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace nvred {

MachineConfig MachineConfig::defaults() {
    MachineConfig c;
    c.l1 = {32 * 1024, 8, 4, 15, 33, kLineSize, false};
    c.l2 = {256 * 1024, 8, 7, 46, 94, kLineSize, false};
    c.llc = {24 * 1024 * 1024, 16, 27, 240, 500, kLineSize, true, true};
    c.llc_plan = {2, 1};
    c.controller.cache = ControllerConfig::default_cache();
    c.nvm = NvmConfig{};
    c.threads = 12;
    return c;
}

EnergyTimingModel MachineConfig::timing() const {
    EnergyTimingModel m = EnergyTimingModel::defaults();
    auto set = [&m](SimEvent hit, SimEvent miss, const CacheLevelConfig& c) {
        m.latency_ns[size_t(hit)] = c.latency_cycles * m.cycle_ns;
        m.energy_pj[size_t(hit)] = c.energy_hit_pj;
        m.latency_ns[size_t(miss)] = 0;
        m.energy_pj[size_t(miss)] = c.energy_miss_pj;
    };
    set(SimEvent::L1Hit, SimEvent::L1Miss, l1);
    set(SimEvent::L2Hit, SimEvent::L2Miss, l2);
    set(SimEvent::LlcHit, SimEvent::LlcMiss, llc);
    set(SimEvent::CtrlCacheHit, SimEvent::CtrlCacheMiss, controller.cache);
    for (SimEvent e : {SimEvent::NvmDataRead, SimEvent::NvmRedundancyRead}) {
        m.latency_ns[size_t(e)] = nvm.read_latency_ns;
        m.energy_pj[size_t(e)] = nvm.energy_read_nj * 1000;
    }
    for (SimEvent e : {SimEvent::NvmDataWrite, SimEvent::NvmRedundancyWrite}) {
        m.latency_ns[size_t(e)] = nvm.write_latency_ns;
        m.energy_pj[size_t(e)] = nvm.energy_write_nj * 1000;
    }
    return m;
}

void MachineConfig::validate() const {
    l1.validate();
    l2.validate();
    llc.validate();
    llc_plan.validate(llc.associativity);
    controller.cache.validate();
    nvm.validate();
    if (threads == 0) throw std::invalid_argument("need at least one thread");
}

namespace {

ControllerConfig with_diff_capacity(ControllerConfig c, const CacheLevelConfig& llc,
                                    const WayPartitionPlan& plan) {
    c.diff_capacity = uint64_t(plan.diff_ways) * llc.sets();
    return c;
}

}  // namespace

Machine::Machine(const MachineConfig& cfg, std::vector<FaultScheduleEntry> faults)
    : cfg_(cfg),
      layout_(cfg.nvm.num_dimms, cfg.nvm.dimm_capacity),
      counters_(cfg.threads),
      nvm_(layout_, cfg.nvm, &counters_),
      hier_(cfg.l1, cfg.l2, cfg.llc, cfg.llc_plan, cfg.threads, &counters_),
      ctrl_(with_diff_capacity(cfg.controller, cfg.llc, cfg.llc_plan), layout_, nvm_, hier_,
            counters_),
      setup_end_(cfg.threads),
      measure_end_(cfg.threads) {
    cfg_.validate();
    nvm_.arm(std::move(faults));
}

void Machine::access(uint32_t thread, bool is_store, uint64_t line_addr,
                     const CacheLine& payload, bool txn_boundary) {
    access_inner(thread, is_store, line_addr, payload);
    if (txn_boundary &&
        (ctrl_.mode() == ControllerMode::TxBObject || ctrl_.mode() == ControllerMode::TxBPage)) {
        ctrl_.txb_commit(
            thread,
            [this](uint32_t t, bool store, uint64_t addr, const CacheLine& p) {
                access_inner(t, store, addr, p);
            },
            [this](uint64_t addr) { return value_of(addr); });
    }
    if (invariant_checks_ && !check_invariants()) invariants_ok_ = false;
}

void Machine::access_inner(uint32_t thread, bool is_store, uint64_t addr,
                           const CacheLine& payload) {
    if (addr % kLineSize != 0) throw std::invalid_argument("access not line-aligned");
    ++ordinal_;

    if (hier_.l1_access(thread, addr)) {
        if (is_store) {
            ctrl_.txb_note_store(thread, addr, hier_.l1(thread).read(addr), payload);
            hier_.l1(thread).write(addr, payload, true);
        }
        return;
    }

    CacheLine content;
    if (hier_.l2_access(thread, addr)) {
        content = hier_.l2(thread).read(addr);
    } else {
        if (hier_.llc_access(addr, Partition::Data, thread)) {
            content = hier_.llc().read(addr);
        } else {
            content = ctrl_.fill(addr, thread, ordinal_);
            install_llc(addr, content, thread);
        }
        install_l2(thread, addr, content, false);
    }
    install_l1(thread, addr, content);
    if (is_store) {
        ctrl_.txb_note_store(thread, addr, content, payload);
        hier_.l1(thread).write(addr, payload, true);
    }
}

void Machine::install_l1(uint32_t t, uint64_t addr, const CacheLine& content) {
    auto victim = hier_.l1(t).install(addr, content, false, Partition::Data);
    if (!victim || !victim->dirty) return;
    // Dirty L1 victim moves down to L2 (clean victims drop silently).
    if (hier_.l2_access(t, victim->addr)) {
        hier_.l2(t).write(victim->addr, victim->content, true);
    } else {
        install_l2(t, victim->addr, victim->content, true);
    }
}

void Machine::install_l2(uint32_t t, uint64_t addr, const CacheLine& content, bool dirty) {
    auto victim = hier_.l2(t).install(addr, content, dirty, Partition::Data);
    if (!victim || !victim->dirty) return;
    // Dirty L2 victim lands in the LLC, which holds it by inclusivity.
    bool hit = hier_.llc_access(victim->addr, Partition::Data, t);
    assert(hit && "inclusive LLC lost an upper-level line");
    if (!hit) return;
    const CacheLine& old_value = hier_.llc().read(victim->addr);
    ctrl_.dirty_install(victim->addr, old_value, victim->content, t);
    hier_.llc().write(victim->addr, victim->content, true);
}

void Machine::install_llc(uint64_t addr, const CacheLine& content, uint32_t t) {
    auto victim = hier_.llc().install(addr, content, false, Partition::Data);
    if (victim) ctrl_.complete_eviction(victim->addr, victim->content, victim->dirty, t);
}

void Machine::drain() {
    // Deterministic set-major iteration order; no need to normalize further.
    std::vector<std::tuple<uint64_t, CacheLine, bool>> lines;
    hier_.llc().for_each_line([&](uint64_t addr, const CacheLine& c, bool dirty, Partition p) {
        if (p == Partition::Data) lines.emplace_back(addr, c, dirty);
    });
    for (auto& [addr, content, dirty] : lines) {
        hier_.llc().invalidate(addr);
        ctrl_.complete_eviction(addr, content, dirty, 0);
    }
    ctrl_.flush_redundancy(0, true);
    assert(ctrl_.diff_store().size() == 0 && "diffs must drain with their dirty lines");
    ctrl_.diff_store().clear();
    hier_.clear();
}

CacheLine Machine::value_of(uint64_t line_addr) const {
    auto& hier = const_cast<CacheHierarchy&>(hier_);
    for (uint32_t t = 0; t < cfg_.threads; ++t)
        if (hier.l1(t).contains(line_addr)) return hier.l1(t).read(line_addr);
    for (uint32_t t = 0; t < cfg_.threads; ++t)
        if (hier.l2(t).contains(line_addr)) return hier.l2(t).read(line_addr);
    if (hier.llc().contains(line_addr)) return hier.llc().read(line_addr);
    return nvm_.peek_line(line_addr);
}

void Machine::set_phase(Phase p) {
    if (p == phase_) return;
    if (int(p) < int(phase_)) throw std::logic_error("phases only advance");
    if (p >= Phase::Measure && phase_ == Phase::Setup) setup_end_ = counters_;
    if (p == Phase::Teardown) measure_end_ = counters_;
    phase_ = p;
}

AccessCounters Machine::counters(Phase p) const {
    switch (p) {
        case Phase::Setup:
            return phase_ == Phase::Setup ? counters_ : setup_end_;
        case Phase::Measure: {
            if (phase_ == Phase::Setup) return AccessCounters(cfg_.threads);
            const AccessCounters& end = phase_ == Phase::Measure ? counters_ : measure_end_;
            return end - setup_end_;
        }
        case Phase::Teardown:
            if (phase_ != Phase::Teardown) return AccessCounters(cfg_.threads);
            return counters_ - measure_end_;
    }
    return AccessCounters(cfg_.threads);
}

bool Machine::check_invariants() const {
    if (!hier_.inclusive_holds()) return false;
    if (!ctrl_.verifies_reads()) return true;
    auto& hier = const_cast<CacheHierarchy&>(hier_);
    auto& ctrl = const_cast<RedundancyController&>(ctrl_);
    bool ok = true;
    hier.llc().for_each_line([&](uint64_t addr, const CacheLine&, bool, Partition p) {
        uint64_t page = addr / layout_.geometry().page_size * layout_.geometry().page_size;
        if (p == Partition::Data && !layout_.is_data_page(page)) ok = false;
        if (p == Partition::Redundancy && !layout_.is_redundancy_addr(addr)) ok = false;
    });
    ctrl.on_controller_cache().for_each_line(
        [&](uint64_t addr, const CacheLine&, bool, Partition) {
            if (!layout_.is_redundancy_addr(addr)) ok = false;
        });
    return ok;
}

}  // namespace nvred
