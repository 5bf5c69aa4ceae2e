// hierarchy.hpp - Three-level cache hierarchy: per-thread private L1 and L2
// plus one shared, inclusive, way-partitioned LLC. Probes count hits and
// misses; installs and coherence traffic (back-invalidation) do not count
// separately. Content travels with the lines.
#pragma once

#include <cstdint>
#include <vector>

#include "nvred/cache.hpp"
#include "nvred/counters.hpp"

namespace nvred {

class CacheHierarchy {
public:
    CacheHierarchy(const CacheLevelConfig& l1, const CacheLevelConfig& l2,
                   const CacheLevelConfig& llc, WayPartitionPlan llc_plan,
                   uint32_t threads, AccessCounters* counters);

    uint32_t threads() const { return l1_.size(); }
    SetAssocCache& l1(uint32_t t) { return l1_[t]; }
    SetAssocCache& l2(uint32_t t) { return l2_[t]; }
    SetAssocCache& llc() { return llc_; }
    const SetAssocCache& llc() const { return llc_; }

    // Counted probes: exactly one hit or miss per call.
    bool l1_access(uint32_t t, uint64_t addr);
    bool l2_access(uint32_t t, uint64_t addr);
    bool llc_access(uint64_t addr, Partition p, uint32_t t);

    struct UpperCopy {
        bool present = false;
        bool dirty = false;
        CacheLine content{};
    };

    // Inclusive invalidation: drop the line from every private cache and
    // report the freshest upper copy (the highest level holds the newest
    // value) together with whether any copy was dirty.
    UpperCopy back_invalidate(uint64_t addr);

    // True while every L1/L2-resident line also resides in the LLC.
    bool inclusive_holds() const;

    void clear();

private:
    std::vector<SetAssocCache> l1_;
    std::vector<SetAssocCache> l2_;
    SetAssocCache llc_;
    AccessCounters* counters_;
};

}  // namespace nvred
