#include "nvred/hierarchy.hpp"

namespace nvred {

CacheHierarchy::CacheHierarchy(const CacheLevelConfig& l1, const CacheLevelConfig& l2,
                               const CacheLevelConfig& llc, WayPartitionPlan llc_plan,
                               uint32_t threads, AccessCounters* counters)
    : llc_(llc, llc_plan), counters_(counters) {
    l1_.reserve(threads);
    l2_.reserve(threads);
    for (uint32_t t = 0; t < threads; ++t) {
        l1_.emplace_back(l1);
        l2_.emplace_back(l2);
    }
}

bool CacheHierarchy::l1_access(uint32_t t, uint64_t addr) {
    bool hit = l1_[t].access(addr, Partition::Data);
    counters_->record(t, hit ? SimEvent::L1Hit : SimEvent::L1Miss);
    return hit;
}

bool CacheHierarchy::l2_access(uint32_t t, uint64_t addr) {
    bool hit = l2_[t].access(addr, Partition::Data);
    counters_->record(t, hit ? SimEvent::L2Hit : SimEvent::L2Miss);
    return hit;
}

bool CacheHierarchy::llc_access(uint64_t addr, Partition p, uint32_t t) {
    bool hit = llc_.access(addr, p);
    counters_->record(t, hit ? SimEvent::LlcHit : SimEvent::LlcMiss);
    return hit;
}

CacheHierarchy::UpperCopy CacheHierarchy::back_invalidate(uint64_t addr) {
    UpperCopy out;
    // L2 first, then L1: the L1 copy, if any, is the freshest.
    for (auto& l2 : l2_) {
        if (!l2.contains(addr)) continue;
        out.present = true;
        out.dirty |= l2.dirty(addr);
        out.content = l2.read(addr);
        l2.invalidate(addr);
    }
    for (auto& l1 : l1_) {
        if (!l1.contains(addr)) continue;
        out.present = true;
        out.dirty |= l1.dirty(addr);
        out.content = l1.read(addr);
        l1.invalidate(addr);
    }
    return out;
}

bool CacheHierarchy::inclusive_holds() const {
    bool ok = true;
    for (uint32_t t = 0; t < threads() && ok; ++t) {
        auto check = [&](uint64_t addr, const CacheLine&, bool, Partition) {
            if (!llc_.contains(addr)) ok = false;
        };
        l1_[t].for_each_line(check);
        l2_[t].for_each_line(check);
    }
    return ok;
}

void CacheHierarchy::clear() {
    for (auto& c : l1_) c.clear();
    for (auto& c : l2_) c.clear();
    llc_.clear();
}

}  // namespace nvred
