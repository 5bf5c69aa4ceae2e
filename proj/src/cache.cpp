#include "nvred/cache.hpp"

namespace nvred {

void CacheLevelConfig::validate() const {
    if (line_size == 0 || capacity == 0 || associativity == 0)
        throw std::invalid_argument("cache config fields must be positive");
    if (capacity % (uint64_t(associativity) * line_size) != 0)
        throw std::invalid_argument("capacity must divide into associativity x line_size");
}

void WayPartitionPlan::validate(uint32_t associativity) const {
    if (redundancy_ways + diff_ways >= associativity)
        throw std::invalid_argument(
            "partition plan leaves no data ways (redundancy_ways + diff_ways must be < associativity)");
}

SetAssocCache::SetAssocCache(const CacheLevelConfig& cfg, WayPartitionPlan plan)
    : cfg_(cfg), plan_(plan), sets_(cfg.sets()) {
    cfg_.validate();
    plan_.validate(cfg_.associativity);
    ways_.resize(sets_ * cfg_.associativity);
}

void SetAssocCache::way_range(Partition p, uint32_t& begin, uint32_t& end) const {
    uint32_t dw = plan_.data_ways(cfg_.associativity);
    switch (p) {
        case Partition::Data: begin = 0; end = dw; break;
        case Partition::Redundancy: begin = dw; end = dw + plan_.redundancy_ways; break;
        case Partition::Diff: begin = dw + plan_.redundancy_ways; end = cfg_.associativity; break;
    }
    if (begin == end) throw std::invalid_argument("partition has no ways at this level");
}

int64_t SetAssocCache::find(uint64_t line_addr) const {
    uint64_t base = set_of(line_addr) * cfg_.associativity;
    for (uint32_t w = 0; w < cfg_.associativity; ++w) {
        const Way& way = ways_[base + w];
        if (way.valid && way.line_addr == line_addr) return int64_t(base + w);
    }
    return -1;
}

bool SetAssocCache::access(uint64_t line_addr, Partition p) {
    if (line_addr % cfg_.line_size != 0)
        throw std::invalid_argument("cache access not line-aligned");
    uint32_t begin, end;
    way_range(p, begin, end);
    uint64_t base = set_of(line_addr) * cfg_.associativity;
    for (uint32_t w = begin; w < end; ++w) {
        Way& way = ways_[base + w];
        if (way.valid && way.line_addr == line_addr) {
            way.lru = ++tick_;
            return true;
        }
    }
    return false;
}

bool SetAssocCache::dirty(uint64_t line_addr) const {
    int64_t i = find(line_addr);
    return i >= 0 && ways_[i].dirty;
}

Partition SetAssocCache::partition_of(uint64_t line_addr) const {
    int64_t i = find(line_addr);
    if (i < 0) throw std::out_of_range("partition_of: line not resident");
    uint32_t w = i % cfg_.associativity;
    uint32_t dw = plan_.data_ways(cfg_.associativity);
    if (w < dw) return Partition::Data;
    if (w < dw + plan_.redundancy_ways) return Partition::Redundancy;
    return Partition::Diff;
}

const CacheLine& SetAssocCache::read(uint64_t line_addr) const {
    int64_t i = find(line_addr);
    if (i < 0) throw std::out_of_range("cache read: line not resident");
    return ways_[i].data;
}

void SetAssocCache::write(uint64_t line_addr, const CacheLine& content, bool mark_dirty) {
    int64_t i = find(line_addr);
    if (i < 0) throw std::out_of_range("cache write: line not resident");
    ways_[i].data = content;
    if (mark_dirty) ways_[i].dirty = true;
    ways_[i].lru = ++tick_;
}

void SetAssocCache::mark_clean(uint64_t line_addr) {
    int64_t i = find(line_addr);
    if (i < 0) throw std::out_of_range("mark_clean: line not resident");
    ways_[i].dirty = false;
}

void SetAssocCache::invalidate(uint64_t line_addr) {
    int64_t i = find(line_addr);
    if (i >= 0) ways_[i].valid = false;
}

std::optional<EvictedLine> SetAssocCache::install(uint64_t line_addr, const CacheLine& content,
                                                  bool dirty, Partition p) {
    if (find(line_addr) >= 0) throw std::logic_error("install: line already resident");
    uint32_t begin, end;
    way_range(p, begin, end);
    uint64_t base = set_of(line_addr) * cfg_.associativity;

    Way* slot = nullptr;
    for (uint32_t w = begin; w < end; ++w) {
        if (!ways_[base + w].valid) {
            slot = &ways_[base + w];
            break;
        }
    }
    std::optional<EvictedLine> victim;
    if (!slot) {
        uint32_t lru_way = begin;
        for (uint32_t w = begin + 1; w < end; ++w)
            if (ways_[base + w].lru < ways_[base + lru_way].lru) lru_way = w;
        Way& v = ways_[base + lru_way];
        victim = EvictedLine{v.line_addr, v.data, v.dirty};
        slot = &v;
    }
    *slot = Way{line_addr, ++tick_, true, dirty, content};
    return victim;
}

size_t SetAssocCache::resident_lines() const {
    size_t n = 0;
    for (const Way& w : ways_)
        if (w.valid) ++n;
    return n;
}

void SetAssocCache::for_each_line(
    const std::function<void(uint64_t, const CacheLine&, bool, Partition)>& fn) const {
    uint32_t dw = plan_.data_ways(cfg_.associativity);
    for (size_t i = 0; i < ways_.size(); ++i) {
        const Way& w = ways_[i];
        if (!w.valid) continue;
        uint32_t wi = i % cfg_.associativity;
        Partition p = wi < dw ? Partition::Data
                    : wi < dw + plan_.redundancy_ways ? Partition::Redundancy
                                                      : Partition::Diff;
        fn(w.line_addr, w.data, w.dirty, p);
    }
}

void SetAssocCache::clear() {
    for (Way& w : ways_) w.valid = false;
    tick_ = 0;
}

}  // namespace nvred
