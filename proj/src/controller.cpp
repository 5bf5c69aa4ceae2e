#include "nvred/controller.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <stdexcept>

#include "nvred/crc32c.hpp"

namespace nvred {

const char* to_string(ControllerMode m) {
    switch (m) {
        case ControllerMode::Off: return "off";
        case ControllerMode::Naive: return "naive";
        case ControllerMode::EV: return "ev";
        case ControllerMode::EVU: return "evu";
        case ControllerMode::TxBObject: return "txb-object";
        case ControllerMode::TxBPage: return "txb-page";
    }
    return "?";
}

std::optional<ControllerMode> controller_mode_from_string(const std::string& s) {
    if (s == "off") return ControllerMode::Off;
    if (s == "naive") return ControllerMode::Naive;
    if (s == "ev") return ControllerMode::EV;
    if (s == "evu" || s == "tvarak") return ControllerMode::EVU;
    if (s == "txb-object") return ControllerMode::TxBObject;
    if (s == "txb-page") return ControllerMode::TxBPage;
    return std::nullopt;
}

CacheLevelConfig ControllerConfig::default_cache() {
    CacheLevelConfig c;
    c.capacity = 4096;
    c.associativity = 4;
    c.latency_cycles = 1;
    c.energy_hit_pj = 15;
    c.energy_miss_pj = 33;
    c.hashed_sets = true;  // 16 sets only; congruent strides would thrash
    return c;
}

// --- DiffStore ---------------------------------------------------------------

void DiffStore::insert(uint64_t addr, const CacheLine& diff) {
    if (contains(addr)) throw std::logic_error("DiffStore::insert: diff already present");
    if (full()) throw std::logic_error("DiffStore::insert: full, evict first");
    lru_.emplace_front(addr, diff);
    map_[addr] = lru_.begin();
}

void DiffStore::fold(uint64_t addr, const CacheLine& diff) {
    auto it = map_.at(addr);
    xor_into(it->second, diff);
    lru_.splice(lru_.begin(), lru_, it);
}

std::pair<uint64_t, CacheLine> DiffStore::lru() const {
    if (lru_.empty()) throw std::logic_error("DiffStore::lru: empty");
    return lru_.back();
}

CacheLine DiffStore::take(uint64_t addr) {
    auto it = map_.at(addr);
    CacheLine d = it->second;
    lru_.erase(it);
    map_.erase(addr);
    return d;
}

// --- ArenaAllocator ----------------------------------------------------------

ArenaAllocator::ArenaAllocator(const RedundancyLayout& layout) : layout_(layout) {
    free_.resize(layout.num_dimms());
    for (uint32_t d = 0; d < layout.num_dimms(); ++d)
        free_[d].push_back({layout.arena_base(d), layout.arena_bytes()});
}

uint64_t ArenaAllocator::allocate(uint64_t bytes) {
    bytes = (bytes + kLineSize - 1) / kLineSize * kLineSize;
    // Pick the DIMM with the largest free block; per-line checksums need not
    // share a DIMM with their data.
    uint32_t best_dimm = 0;
    size_t best_idx = 0;
    uint64_t best = 0;
    for (uint32_t d = 0; d < free_.size(); ++d) {
        for (size_t i = 0; i < free_[d].size(); ++i) {
            if (free_[d][i].bytes > best) {
                best = free_[d][i].bytes;
                best_dimm = d;
                best_idx = i;
            }
        }
    }
    if (best < bytes)
        throw std::runtime_error("arena exhausted: cannot place checksum buffer of " +
                                 std::to_string(bytes) + " bytes");
    Range& r = free_[best_dimm][best_idx];
    uint64_t addr = r.base;
    r.base += bytes;
    r.bytes -= bytes;
    if (r.bytes == 0) free_[best_dimm].erase(free_[best_dimm].begin() + best_idx);
    return addr;
}

void ArenaAllocator::release(uint64_t addr, uint64_t bytes) {
    bytes = (bytes + kLineSize - 1) / kLineSize * kLineSize;
    uint32_t d = layout_.dimm_of(addr);
    auto& list = free_[d];
    list.push_back({addr, bytes});
    std::sort(list.begin(), list.end(),
              [](const Range& a, const Range& b) { return a.base < b.base; });
    for (size_t i = 0; i + 1 < list.size();) {
        if (list[i].base + list[i].bytes == list[i + 1].base) {
            list[i].bytes += list[i + 1].bytes;
            list.erase(list.begin() + i + 1);
        } else {
            ++i;
        }
    }
}

// --- RedundancyController ------------------------------------------------------

RedundancyController::RedundancyController(const ControllerConfig& cfg,
                                           const RedundancyLayout& layout, NvmDevice& nvm,
                                           CacheHierarchy& hier, AccessCounters& counters)
    : cfg_(cfg),
      layout_(layout),
      nvm_(nvm),
      hier_(hier),
      counters_(counters),
      ctrl_cache_(cfg.cache),
      diffs_(cfg.diff_capacity),
      arena_(layout),
      txb_(hier.threads()) {
    for (uint64_t l = 0; l < geom().lines_per_page(); ++l)
        shift_ops_.emplace_back(geom().page_size - l * kLineSize - kLineSize);
    if (cfg_.mode == ControllerMode::TxBObject) {
        if (cfg_.object_size % kLineSize != 0 || geom().page_size % cfg_.object_size != 0)
            throw std::invalid_argument("object_size must be a line multiple dividing the page size");
        nvm_.set_objcsum_format(crc32c(std::vector<uint8_t>(cfg_.object_size, 0)),
                                cfg_.object_size / kLineSize);
    }
}

NvmClass RedundancyController::class_by_address(uint64_t addr) const {
    return layout_.is_data_page(page_of(addr)) ? NvmClass::Data : NvmClass::Redundancy;
}

// --- mapping table ---------------------------------------------------------------

const DaxMapping* RedundancyController::mapping_of(uint64_t addr) const {
    uint64_t page = page_of(addr);
    if (!layout_.is_data_page(page)) return nullptr;
    uint64_t logical = layout_.logical_page_of(page);
    for (const DaxMapping& m : mappings_)
        if (logical >= m.first_logical_page && logical < m.first_logical_page + m.page_count)
            return &m;
    return nullptr;
}

void RedundancyController::map_file(uint64_t first_logical_page, uint64_t page_count,
                                    uint32_t thread) {
    if (page_count == 0) throw std::invalid_argument("map_file: empty range");
    if (first_logical_page + page_count > layout_.total_data_pages())
        throw std::out_of_range("map_file: range beyond data capacity");
    for (const DaxMapping& m : mappings_) {
        bool disjoint = first_logical_page + page_count <= m.first_logical_page ||
                        m.first_logical_page + m.page_count <= first_logical_page;
        if (!disjoint)
            throw std::invalid_argument("map_file: range overlaps an existing mapping");
    }

    DaxMapping m{first_logical_page, page_count, {}};
    if (cfg_.mode == ControllerMode::EV || cfg_.mode == ControllerMode::EVU) {
        uint64_t entries = page_count * geom().lines_per_page();
        uint64_t bytes = entries * 4;
        m.buf = DaxClChecksumBuffer{arena_.allocate(bytes), first_logical_page, page_count,
                                    bytes};
        // Eager initialization from media, charged as redundancy reads.
        const uint64_t per_line = geom().checksums_per_line();
        CacheLine packed{};
        uint64_t slot = 0, out = m.buf.base;
        for (uint64_t p = 0; p < page_count; ++p) {
            uint64_t page_addr = layout_.data_page_addr(first_logical_page + p);
            for (uint64_t l = 0; l < geom().lines_per_page(); ++l) {
                auto res = nvm_.read_line(page_addr + l * kLineSize, NvmClass::Redundancy, thread);
                if (res.misdirected) poison(page_addr + l * kLineSize);
                const CacheLine& data = res.data;
                uint32_t sum = crc32c(data);
                counters_.record(thread, SimEvent::ChecksumCompute);
                std::memcpy(packed.data() + 4 * slot, &sum, 4);
                if (++slot == per_line) {
                    nvm_.write_line(out, packed, NvmClass::Redundancy, thread);
                    out += kLineSize;
                    slot = 0;
                    packed = CacheLine{};
                }
            }
        }
        if (slot) nvm_.write_line(out, packed, NvmClass::Redundancy, thread);
    }
    mappings_.push_back(m);
    std::sort(mappings_.begin(), mappings_.end(),
              [](const DaxMapping& a, const DaxMapping& b) {
                  return a.first_logical_page < b.first_logical_page;
              });
}

void RedundancyController::unmap_file(uint64_t first_logical_page, uint32_t thread) {
    auto it = std::find_if(mappings_.begin(), mappings_.end(), [&](const DaxMapping& m) {
        return m.first_logical_page == first_logical_page;
    });
    if (it == mappings_.end()) throw std::invalid_argument("unmap_file: range not mapped");
    DaxMapping m = *it;

    evict_data_range(m.first_logical_page, m.page_count, thread);
    flush_redundancy(thread, false);
    if (m.buf.size_bytes) {
        invalidate_cached_redundancy(m.buf.base, m.buf.size_bytes);
        arena_.release(m.buf.base, m.buf.size_bytes);
    }
    mappings_.erase(std::find_if(mappings_.begin(), mappings_.end(), [&](const DaxMapping& x) {
        return x.first_logical_page == first_logical_page;
    }));
}

void RedundancyController::unmap_all(uint32_t thread) {
    while (!mappings_.empty()) unmap_file(mappings_.front().first_logical_page, thread);
}

// --- EVU redundancy-line caching -------------------------------------------------

// Locate a redundancy line for the controller: the on-controller cache
// first, then the LLC partition, then NVM. Lines found in the LLC partition
// are served in place (the controller sits beside the LLC banks); only NVM
// fetches are installed into the on-controller cache, whose victims spill
// to the LLC partition. The spill is part of servicing the original miss
// and is not a separate counted access.
SetAssocCache* RedundancyController::redundancy_locate(uint64_t line_addr, uint32_t thread) {
    if (ctrl_cache_.access(line_addr, Partition::Data)) {
        counters_.record(thread, SimEvent::CtrlCacheHit);
        return &ctrl_cache_;
    }
    counters_.record(thread, SimEvent::CtrlCacheMiss);
    if (hier_.llc_access(line_addr, Partition::Redundancy, thread)) return &hier_.llc();
    CacheLine content = nvm_.read_line(line_addr, NvmClass::Redundancy, thread).data;
    auto victim = ctrl_cache_.install(line_addr, content, false, Partition::Data);
    if (victim) spill_to_llc(*victim, thread);
    return &ctrl_cache_;
}

void RedundancyController::spill_to_llc(const EvictedLine& victim, uint32_t thread) {
    auto displaced =
        hier_.llc().install(victim.addr, victim.content, victim.dirty, Partition::Redundancy);
    if (displaced && displaced->dirty)
        nvm_.write_line(displaced->addr, displaced->content, NvmClass::Redundancy, thread);
}

uint32_t RedundancyController::redundancy_read_u32(uint64_t entry_addr, uint32_t thread) {
    uint64_t line_addr = entry_addr / kLineSize * kLineSize;
    const CacheLine& l = redundancy_locate(line_addr, thread)->read(line_addr);
    uint32_t v;
    std::memcpy(&v, l.data() + entry_addr % kLineSize, 4);
    return v;
}

void RedundancyController::redundancy_rmw(uint64_t line_addr,
                                          const std::function<void(CacheLine&)>& mutate,
                                          uint32_t thread) {
    SetAssocCache* holder = redundancy_locate(line_addr, thread);
    CacheLine l = holder->read(line_addr);
    mutate(l);
    holder->write(line_addr, l, true);
}

void RedundancyController::flush_redundancy(uint32_t thread, bool invalidate) {
    std::vector<uint64_t> lines;
    ctrl_cache_.for_each_line([&](uint64_t addr, const CacheLine& content, bool dirty, Partition) {
        if (dirty) nvm_.write_line(addr, content, NvmClass::Redundancy, thread);
        lines.push_back(addr);
    });
    for (uint64_t a : lines) {
        if (invalidate) ctrl_cache_.invalidate(a);
        else ctrl_cache_.mark_clean(a);
    }
    lines.clear();
    hier_.llc().for_each_line([&](uint64_t addr, const CacheLine& content, bool dirty, Partition p) {
        if (p != Partition::Redundancy) return;
        if (dirty) nvm_.write_line(addr, content, NvmClass::Redundancy, thread);
        lines.push_back(addr);
    });
    for (uint64_t a : lines) {
        if (invalidate) hier_.llc().invalidate(a);
        else hier_.llc().mark_clean(a);
    }
}

void RedundancyController::invalidate_cached_redundancy(uint64_t base, uint64_t bytes) {
    std::vector<uint64_t> doomed;
    auto collect = [&](uint64_t addr, const CacheLine&, bool, Partition p) {
        if (addr >= base && addr < base + bytes &&
            (p == Partition::Data || p == Partition::Redundancy))
            doomed.push_back(addr);
    };
    ctrl_cache_.for_each_line(collect);
    for (uint64_t a : doomed) ctrl_cache_.invalidate(a);
    doomed.clear();
    hier_.llc().for_each_line([&](uint64_t addr, const CacheLine& c, bool d, Partition p) {
        if (p == Partition::Redundancy) collect(addr, c, d, p);
    });
    for (uint64_t a : doomed) hier_.llc().invalidate(a);
}

// --- write path ------------------------------------------------------------------

void RedundancyController::nvm_rmw(uint64_t line_addr,
                                   const std::function<void(CacheLine&)>& mutate,
                                   uint32_t thread) {
    CacheLine l = nvm_.read_line(line_addr, NvmClass::Redundancy, thread).data;
    mutate(l);
    nvm_.write_line(line_addr, l, NvmClass::Redundancy, thread);
}

void RedundancyController::update_redundancy_for_write(uint64_t addr,
                                                       const CacheLine& new_content,
                                                       const CacheLine& diff,
                                                       const DaxMapping& m, uint32_t thread) {
    const uint64_t page_addr = page_of(addr);
    const uint64_t offset_in_page = addr - page_addr;
    const uint64_t trailing = geom().page_size - offset_in_page - kLineSize;

    // Page system-checksum, updated incrementally from the diff.
    uint64_t csum_entry = layout_.system_checksum_addr(page_addr);
    uint32_t delta = shift_ops_[offset_in_page / kLineSize].apply(crc_raw(diff));
    counters_.record(thread, SimEvent::ChecksumCompute);
    auto apply_csum = [&](CacheLine& l) {
        uint32_t v;
        std::memcpy(&v, l.data() + csum_entry % kLineSize, 4);
        v ^= delta;
        std::memcpy(l.data() + csum_entry % kLineSize, &v, 4);
    };

    // Per-line checksum of the new content (EV/EVU).
    uint64_t daxcl_entry = 0;
    uint32_t new_line_sum = 0;
    if (m.buf.size_bytes) {
        daxcl_entry = dax_cl_checksum_addr(addr, m.buf, layout_);
        new_line_sum = crc32c(new_content);
        counters_.record(thread, SimEvent::ChecksumCompute);
    }
    auto apply_daxcl = [&](CacheLine& l) {
        std::memcpy(l.data() + daxcl_entry % kLineSize, &new_line_sum, 4);
    };

    // Parity line at the same offset within the stripe's parity page.
    uint64_t parity_line = layout_.parity_addr(page_addr).page_addr + offset_in_page;
    counters_.record(thread, SimEvent::ChecksumCompute);
    auto apply_parity = [&](CacheLine& l) { xor_into(l, diff); };

    if (cfg_.mode == ControllerMode::EVU) {
        redundancy_rmw(csum_entry / kLineSize * kLineSize, apply_csum, thread);
        if (m.buf.size_bytes)
            redundancy_rmw(daxcl_entry / kLineSize * kLineSize, apply_daxcl, thread);
        redundancy_rmw(parity_line, apply_parity, thread);
    } else {
        nvm_rmw(csum_entry / kLineSize * kLineSize, apply_csum, thread);
        if (m.buf.size_bytes)
            nvm_rmw(daxcl_entry / kLineSize * kLineSize, apply_daxcl, thread);
        nvm_rmw(parity_line, apply_parity, thread);
    }
}

void RedundancyController::writeback(uint64_t addr, const CacheLine& new_content,
                                     const CacheLine& llc_old, bool was_dirty,
                                     uint32_t thread) {
    const DaxMapping* m = verifies_reads() ? mapping_of(addr) : nullptr;
    if (!m) {
        nvm_.write_line(addr, new_content, class_by_address(addr), thread);
        return;
    }
    counters_.record(thread, SimEvent::RangeMatch);

    CacheLine diff;
    if (cfg_.mode == ControllerMode::EVU) {
        if (diffs_.contains(addr)) {
            diff = diffs_.take(addr);
            xor_into(diff, line_diff(llc_old, new_content));
        } else if (!was_dirty) {
            // Dirtiness arrived through an upper-level merge; the LLC copy
            // was media-consistent.
            diff = line_diff(llc_old, new_content);
        } else {
            // Only reachable with the diff store disabled.
            assert(diffs_.capacity() == 0 && "dirty LLC line without a stored diff");
            auto res = nvm_.read_line(addr, NvmClass::Data, thread);
            if (res.misdirected) poison(addr);
            diff = line_diff(res.data, new_content);
        }
    } else {
        auto res = nvm_.read_line(addr, NvmClass::Data, thread);
        if (res.misdirected) poison(addr);
        diff = line_diff(res.data, new_content);
    }
    update_redundancy_for_write(addr, new_content, diff, *m, thread);
    nvm_.write_line(addr, new_content, NvmClass::Data, thread);
}

void RedundancyController::dirty_install(uint64_t addr, const CacheLine& llc_old,
                                         const CacheLine& new_content, uint32_t thread) {
    if (cfg_.mode != ControllerMode::EVU || diffs_.capacity() == 0) return;
    if (!is_mapped(addr)) return;
    CacheLine diff = line_diff(llc_old, new_content);
    if (diffs_.contains(addr)) {
        diffs_.fold(addr, diff);
        return;
    }
    if (diffs_.full()) {
        // Evict the oldest diff: write its data back without evicting the
        // line, then mark the line clean so a later eviction is free.
        auto [victim_addr, victim_diff] = diffs_.lru();
        diffs_.take(victim_addr);
        const CacheLine& content = hier_.llc().read(victim_addr);
        update_redundancy_for_write(victim_addr, content, victim_diff,
                                    *mapping_of(victim_addr), thread);
        nvm_.write_line(victim_addr, content, NvmClass::Data, thread);
        hier_.llc().mark_clean(victim_addr);
    }
    diffs_.insert(addr, diff);
}

void RedundancyController::complete_eviction(uint64_t addr, const CacheLine& llc_content,
                                             bool llc_dirty, uint32_t thread) {
    auto upper = hier_.back_invalidate(addr);
    const CacheLine& content = upper.present ? upper.content : llc_content;
    bool dirty = llc_dirty || upper.dirty;
    if (dirty) writeback(addr, content, llc_content, llc_dirty, thread);
    else if (cfg_.mode == ControllerMode::EVU && diffs_.contains(addr))
        diffs_.take(addr);  // clean line leaving the LLC drops its stale diff
}

void RedundancyController::evict_data_range(uint64_t first_logical_page, uint64_t page_count,
                                            uint32_t thread) {
    std::vector<std::tuple<uint64_t, CacheLine, bool>> doomed;
    hier_.llc().for_each_line([&](uint64_t addr, const CacheLine& c, bool dirty, Partition p) {
        if (p != Partition::Data) return;
        uint64_t page = page_of(addr);
        if (!layout_.is_data_page(page)) return;
        uint64_t logical = layout_.logical_page_of(page);
        if (logical >= first_logical_page && logical < first_logical_page + page_count)
            doomed.emplace_back(addr, c, dirty);
    });
    std::sort(doomed.begin(), doomed.end(),
              [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
    for (auto& [addr, content, dirty] : doomed) {
        hier_.llc().invalidate(addr);
        complete_eviction(addr, content, dirty, thread);
    }
}

// --- read path -------------------------------------------------------------------

RedundancyController::VerifyResult RedundancyController::verify_fill_once(
    uint64_t addr, const DaxMapping& m, uint32_t thread) {
    VerifyResult r{};
    const uint64_t page_addr = page_of(addr);

    if (cfg_.mode == ControllerMode::Naive) {
        // Read the whole page; only the demanded line is a data-class read.
        std::vector<uint8_t> page_bytes(geom().page_size);
        for (uint64_t l = 0; l < geom().lines_per_page(); ++l) {
            uint64_t la = page_addr + l * kLineSize;
            auto res = nvm_.read_line(la, la == addr ? NvmClass::Data : NvmClass::Redundancy,
                                      thread);
            if (res.misdirected) r.misdirected_fired.push_back(nvm_.fired_faults().size() - 1);
            std::memcpy(page_bytes.data() + l * kLineSize, res.data.data(), kLineSize);
            if (la == addr) r.content = res.data;
        }
        r.computed = crc32c(page_bytes);
        counters_.record(thread, SimEvent::ChecksumCompute, geom().lines_per_page());
        uint64_t entry = layout_.system_checksum_addr(page_addr);
        CacheLine csum_line =
            nvm_.read_line(entry / kLineSize * kLineSize, NvmClass::Redundancy, thread).data;
        std::memcpy(&r.expected, csum_line.data() + entry % kLineSize, 4);
        r.scope_base = page_addr;
        r.scope_bytes = geom().page_size;
    } else {
        // EV/EVU: one checksum line plus the data line.
        uint64_t entry = dax_cl_checksum_addr(addr, m.buf, layout_);
        if (cfg_.mode == ControllerMode::EVU) {
            r.expected = redundancy_read_u32(entry, thread);
        } else {
            CacheLine l =
                nvm_.read_line(entry / kLineSize * kLineSize, NvmClass::Redundancy, thread).data;
            std::memcpy(&r.expected, l.data() + entry % kLineSize, 4);
        }
        auto res = nvm_.read_line(addr, NvmClass::Data, thread);
        if (res.misdirected) r.misdirected_fired.push_back(nvm_.fired_faults().size() - 1);
        r.content = res.data;
        r.computed = crc32c(res.data);
        counters_.record(thread, SimEvent::ChecksumCompute);
        r.scope_base = addr;
        r.scope_bytes = kLineSize;
    }
    r.ok = (r.computed == r.expected);
    r.any_corrupt_in_scope = false;
    for (uint64_t la = r.scope_base; la < r.scope_base + r.scope_bytes; la += kLineSize)
        if (nvm_.line_is_corrupted(la)) r.any_corrupt_in_scope = true;
    return r;
}

void RedundancyController::poison(uint64_t line_addr) {
    // A controller-side read was served from the wrong location; the
    // redundancy derived from it is wrong for this line. Remember the fired
    // fault so a later checksum-mismatch detection can be attributed to it.
    poisoned_[line_addr].push_back(nvm_.fired_faults().size() - 1);
}

void RedundancyController::mark_scope_detected(uint64_t scope_base, uint64_t scope_bytes,
                                               const std::vector<size_t>& misdirected_fired) {
    const auto& corrupted = nvm_.corrupted_lines();
    for (uint64_t la = scope_base; la < scope_base + scope_bytes; la += kLineSize) {
        auto it = corrupted.find(la);
        if (it != corrupted.end())
            for (size_t idx : it->second) detected_faults_.insert(idx);
        auto pit = poisoned_.find(la);
        if (pit != poisoned_.end()) {
            for (size_t idx : pit->second) detected_faults_.insert(idx);
            poisoned_.erase(pit);
        }
    }
    for (size_t idx : misdirected_fired) detected_faults_.insert(idx);
}

CacheLine RedundancyController::fill(uint64_t addr, uint32_t thread, uint64_t ordinal) {
    if (!verifies_reads()) return nvm_.read_line(addr, class_by_address(addr), thread).data;
    const DaxMapping* m = mapping_of(addr);
    if (!m) return nvm_.read_line(addr, class_by_address(addr), thread).data;
    counters_.record(thread, SimEvent::RangeMatch);

    while (true) {
        VerifyResult r = verify_fill_once(addr, *m, thread);
        if (r.ok) {
            if (!r.misdirected_fired.empty() || r.any_corrupt_in_scope) ++missed_;
            return r.content;
        }
        CorruptionEvent ev{ordinal, addr, r.expected, r.computed, false};
        mark_scope_detected(r.scope_base, r.scope_bytes, r.misdirected_fired);
        if (!cfg_.recovery_enabled) {
            detections_.push_back(ev);
            return r.content;
        }
        bool ok = recover_page(page_of(addr), thread);
        ev.recovered = ok;
        detections_.push_back(ev);
        if (!ok) return r.content;
        // Media is consistent again; retry the verified fill.
    }
}

// --- recovery ---------------------------------------------------------------------

bool RedundancyController::recover_page(uint64_t page_addr, uint32_t thread) {
    if (cfg_.mode == ControllerMode::EVU) flush_redundancy(thread, false);
    const uint64_t lines = geom().lines_per_page();
    const uint64_t row = layout_.row_of(page_addr);
    const uint32_t target_dimm = layout_.dimm_of(page_addr);

    std::vector<CacheLine> acc(lines, CacheLine{});
    for (uint32_t d = 0; d < layout_.num_dimms(); ++d) {
        if (d == target_dimm) continue;
        uint64_t member = layout_.dimm_base(d) + row * geom().page_size;
        bool is_parity = layout_.is_parity_page(member);
        std::vector<uint8_t> bytes(geom().page_size);
        for (uint64_t l = 0; l < lines; ++l) {
            auto res = nvm_.read_line(member + l * kLineSize,
                                      is_parity ? NvmClass::Redundancy : NvmClass::Data, thread);
            std::memcpy(bytes.data() + l * kLineSize, res.data.data(), kLineSize);
            xor_into(acc[l], res.data);
        }
        if (!is_parity) {
            // Verify each surviving data page with its same-DIMM checksum.
            uint64_t entry = layout_.system_checksum_addr(member);
            CacheLine csum_line =
                nvm_.read_line(entry / kLineSize * kLineSize, NvmClass::Redundancy, thread).data;
            uint32_t expected;
            std::memcpy(&expected, csum_line.data() + entry % kLineSize, 4);
            counters_.record(thread, SimEvent::ChecksumCompute, lines);
            if (crc32c(bytes) != expected) {
                ++recoveries_failed_;
                return false;  // a second corrupt member: single parity cannot recover
            }
        }
    }

    // The reconstruction must match the corrupt page's own system-checksum.
    std::vector<uint8_t> rebuilt(geom().page_size);
    for (uint64_t l = 0; l < lines; ++l)
        std::memcpy(rebuilt.data() + l * kLineSize, acc[l].data(), kLineSize);
    uint64_t entry = layout_.system_checksum_addr(page_addr);
    CacheLine csum_line =
        nvm_.read_line(entry / kLineSize * kLineSize, NvmClass::Redundancy, thread).data;
    uint32_t expected;
    std::memcpy(&expected, csum_line.data() + entry % kLineSize, 4);
    counters_.record(thread, SimEvent::ChecksumCompute, lines);
    if (crc32c(rebuilt) != expected) {
        ++recoveries_failed_;
        return false;
    }

    for (uint64_t l = 0; l < lines; ++l)
        nvm_.write_line(page_addr + l * kLineSize, acc[l], NvmClass::Data, thread);

    // Refresh the per-line checksum entries for the recovered page.
    const DaxMapping* m = mapping_of(page_addr);
    if (m && m->buf.size_bytes) {
        uint64_t first_entry = dax_cl_checksum_addr(page_addr, m->buf, layout_);
        uint64_t out = first_entry / kLineSize * kLineSize;
        CacheLine packed = nvm_.peek_line(out);
        for (uint64_t l = 0; l < lines; ++l) {
            uint64_t e = first_entry + 4 * l;
            if (e / kLineSize * kLineSize != out) {
                nvm_.write_line(out, packed, NvmClass::Redundancy, thread);
                out = e / kLineSize * kLineSize;
                packed = nvm_.peek_line(out);
            }
            uint32_t sum = crc32c(acc[l]);
            counters_.record(thread, SimEvent::ChecksumCompute);
            std::memcpy(packed.data() + e % kLineSize, &sum, 4);
        }
        nvm_.write_line(out, packed, NvmClass::Redundancy, thread);
        if (cfg_.mode == ControllerMode::EVU)
            invalidate_cached_redundancy(first_entry / kLineSize * kLineSize,
                                         (lines / geom().checksums_per_line() + 2) * kLineSize);
    }
    ++recoveries_ok_;
    return true;
}

// --- software baselines -------------------------------------------------------------

void RedundancyController::txb_note_store(uint32_t thread, uint64_t addr,
                                          const CacheLine& old_value,
                                          const CacheLine& new_value) {
    if (cfg_.mode != ControllerMode::TxBObject && cfg_.mode != ControllerMode::TxBPage) return;
    TxnState& st = txb_[thread];
    if (st.in_commit) return;
    if (!is_mapped(addr)) return;
    CacheLine diff = line_diff(old_value, new_value);
    auto it = st.diffs.find(addr);
    if (it == st.diffs.end()) {
        st.diffs.emplace(addr, diff);
        st.order.push_back(addr);
    } else {
        xor_into(it->second, diff);
    }
}

void RedundancyController::txb_commit(uint32_t thread, const AccessFn& access,
                                      const ValueFn& value) {
    TxnState& st = txb_[thread];
    if (st.order.empty()) return;
    st.in_commit = true;

    // Group dirtied lines by page, preserving first-dirtied order.
    std::vector<uint64_t> pages;
    std::unordered_map<uint64_t, std::vector<uint64_t>> by_page;
    for (uint64_t addr : st.order) {
        uint64_t p = page_of(addr);
        auto& v = by_page[p];
        if (v.empty()) pages.push_back(p);
        v.push_back(addr);
    }

    auto store_u32 = [&](uint64_t entry_addr, uint32_t v) {
        uint64_t line = entry_addr / kLineSize * kLineSize;
        access(thread, false, line, CacheLine{});
        CacheLine cur = value(line);
        std::memcpy(cur.data() + entry_addr % kLineSize, &v, 4);
        access(thread, true, line, cur);
    };
    auto update_parity = [&](uint64_t line_addr, const CacheLine& diff) {
        uint64_t page = page_of(line_addr);
        uint64_t pline = layout_.parity_addr(page).page_addr + (line_addr - page);
        access(thread, false, pline, CacheLine{});
        CacheLine cur = value(pline);
        xor_into(cur, diff);
        access(thread, true, pline, cur);
    };

    for (uint64_t page : pages) {
        const auto& dirtied = by_page[page];
        if (cfg_.mode == ControllerMode::TxBPage) {
            // Recompute the page checksum from the full page image.
            std::vector<uint8_t> bytes(geom().page_size);
            for (uint64_t l = 0; l < geom().lines_per_page(); ++l) {
                uint64_t la = page + l * kLineSize;
                access(thread, false, la, CacheLine{});
                CacheLine cur = value(la);
                std::memcpy(bytes.data() + l * kLineSize, cur.data(), kLineSize);
            }
            store_u32(layout_.system_checksum_addr(page), crc32c(bytes));
        } else {
            // Object checksums over the dirtied objects only.
            std::vector<uint64_t> objs;
            for (uint64_t addr : dirtied) {
                uint64_t obj = (addr - page) / cfg_.object_size * cfg_.object_size;
                if (std::find(objs.begin(), objs.end(), obj) == objs.end()) objs.push_back(obj);
            }
            for (uint64_t obj : objs) {
                std::vector<uint8_t> bytes(cfg_.object_size);
                for (uint64_t o = 0; o < cfg_.object_size; o += kLineSize) {
                    uint64_t la = page + obj + o;
                    access(thread, false, la, CacheLine{});
                    CacheLine cur = value(la);
                    std::memcpy(bytes.data() + o, cur.data(), kLineSize);
                }
                store_u32(layout_.object_checksum_addr(page, obj, cfg_.object_size),
                          crc32c(bytes));
            }
        }
        for (uint64_t addr : dirtied) update_parity(addr, st.diffs.at(addr));
    }

    st.diffs.clear();
    st.order.clear();
    st.in_commit = false;
}

}  // namespace nvred
