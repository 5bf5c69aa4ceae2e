// cache.hpp - Set-associative cache with LRU replacement and fixed way
// partitions. Lines carry their content so that diff computation and
// checksum verification operate on real values. Lookups are confined to
// the addressed partition's ways; a miss never disturbs other partitions.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nvred/lines.hpp"

namespace nvred {

enum class Partition : uint8_t { Data, Redundancy, Diff };

struct CacheLevelConfig {
    uint64_t capacity = 0;
    uint32_t associativity = 0;
    uint32_t latency_cycles = 0;
    double energy_hit_pj = 0;
    double energy_miss_pj = 0;
    uint64_t line_size = kLineSize;
    bool inclusive = false;
    // Spread set indices with a multiplicative hash (banked LLCs hash their
    // index bits; plain modulo for the private levels).
    bool hashed_sets = false;

    uint64_t sets() const { return capacity / (uint64_t(associativity) * line_size); }
    void validate() const;
};

struct WayPartitionPlan {
    uint32_t redundancy_ways = 0;
    uint32_t diff_ways = 0;

    uint32_t data_ways(uint32_t associativity) const {
        return associativity - redundancy_ways - diff_ways;
    }
    void validate(uint32_t associativity) const;
};

struct EvictedLine {
    uint64_t addr;
    CacheLine content;
    bool dirty;
};

class SetAssocCache {
public:
    SetAssocCache(const CacheLevelConfig& cfg, WayPartitionPlan plan = {});

    const CacheLevelConfig& config() const { return cfg_; }
    const WayPartitionPlan& plan() const { return plan_; }

    // Probe for the line in the given partition; updates LRU on hit.
    bool access(uint64_t line_addr, Partition p);

    bool contains(uint64_t line_addr) const { return find(line_addr) >= 0; }
    bool dirty(uint64_t line_addr) const;
    Partition partition_of(uint64_t line_addr) const;
    const CacheLine& read(uint64_t line_addr) const;
    void write(uint64_t line_addr, const CacheLine& content, bool mark_dirty);
    void mark_clean(uint64_t line_addr);
    void invalidate(uint64_t line_addr);

    // Insert a line into the partition; evicts the partition's LRU way of
    // the set if full and reports the victim. Cold ways fill lowest-index
    // first. The line must not already be present.
    std::optional<EvictedLine> install(uint64_t line_addr, const CacheLine& content,
                                       bool dirty, Partition p);

    size_t resident_lines() const;
    void for_each_line(
        const std::function<void(uint64_t addr, const CacheLine&, bool dirty, Partition)>& fn) const;
    void clear();

private:
    struct Way {
        uint64_t line_addr = 0;
        uint64_t lru = 0;
        bool valid = false;
        bool dirty = false;
        CacheLine data{};
    };

    uint64_t set_of(uint64_t line_addr) const {
        uint64_t idx = line_addr / cfg_.line_size;
        if (cfg_.hashed_sets) idx = (idx * 0x9E3779B97F4A7C15ull) >> 16;
        return idx % sets_;
    }
    void way_range(Partition p, uint32_t& begin, uint32_t& end) const;
    // Index into ways_ or -1.
    int64_t find(uint64_t line_addr) const;

    CacheLevelConfig cfg_;
    WayPartitionPlan plan_;
    uint64_t sets_;
    uint64_t tick_ = 0;
    std::vector<Way> ways_;  // sets_ x associativity, row-major
};

}  // namespace nvred
