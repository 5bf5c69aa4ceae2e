// controller.hpp - The redundancy controller designs and software baselines.
//
//   Off     no redundancy; reads and writes pass through untouched.
//   Naive   verifies a read by fetching the whole page plus its page
//           system-checksum; updates checksum and parity on every data
//           write-back with an old-data read, straight to NVM.
//   EV      adds per-line checksums for DAX-mapped data: a verified read
//           costs one data line plus one checksum line.
//   EVU     adds an on-controller redundancy cache backed by an LLC way
//           partition, and a diff store that removes the old-data read on
//           write-backs. Updated redundancy stays cached until evicted or
//           unmapped (battery-backed caches).
//   TxBObject / TxBPage
//           software-only baselines that update object- or page-granular
//           checksums and parity through the ordinary cache hierarchy at
//           transaction boundaries; no read verification.
//
// The controller interposes on LLC fills and write-backs for DAX-mapped
// lines, detects checksum mismatches, and drives page recovery from the
// cross-DIMM parity.
#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "nvred/cache.hpp"
#include "nvred/crc32c.hpp"
#include "nvred/counters.hpp"
#include "nvred/hierarchy.hpp"
#include "nvred/layout.hpp"
#include "nvred/nvm.hpp"

namespace nvred {

enum class ControllerMode : uint8_t { Off, Naive, EV, EVU, TxBObject, TxBPage };

const char* to_string(ControllerMode m);
std::optional<ControllerMode> controller_mode_from_string(const std::string& s);

struct ControllerConfig {
    ControllerMode mode = ControllerMode::Off;
    uint64_t object_size = 64;  // TxBObject checksum granularity
    CacheLevelConfig cache;     // on-controller cache (EVU only)
    bool recovery_enabled = true;
    uint64_t diff_capacity = 0;  // diff store entries; 0 disables data diffs

    static CacheLevelConfig default_cache();
};

struct DaxMapping {
    uint64_t first_logical_page = 0;
    uint64_t page_count = 0;
    DaxClChecksumBuffer buf;  // size_bytes == 0 when the mode keeps none
};

struct CorruptionEvent {
    uint64_t detected_at = 0;  // machine access ordinal
    uint64_t line_addr = 0;
    uint32_t expected_checksum = 0;
    uint32_t computed_checksum = 0;
    bool recovered = false;
};

// LRU map of per-line XOR diffs, bounded by the LLC diff partition size.
// At most one diff per line; later diffs fold in by XOR.
class DiffStore {
public:
    explicit DiffStore(uint64_t capacity) : capacity_(capacity) {}

    uint64_t capacity() const { return capacity_; }
    size_t size() const { return map_.size(); }
    bool contains(uint64_t addr) const { return map_.count(addr) != 0; }
    bool full() const { return map_.size() >= capacity_; }

    void insert(uint64_t addr, const CacheLine& diff);
    void fold(uint64_t addr, const CacheLine& diff);
    std::pair<uint64_t, CacheLine> lru() const;
    CacheLine take(uint64_t addr);
    void clear() { lru_.clear(); map_.clear(); }

private:
    uint64_t capacity_;
    std::list<std::pair<uint64_t, CacheLine>> lru_;  // front = most recent
    std::unordered_map<uint64_t, std::list<std::pair<uint64_t, CacheLine>>::iterator> map_;
};

// Simple first-fit free-list allocator over the per-DIMM buffer arenas.
class ArenaAllocator {
public:
    explicit ArenaAllocator(const RedundancyLayout& layout);
    uint64_t allocate(uint64_t bytes);  // line-aligned; throws when exhausted
    void release(uint64_t addr, uint64_t bytes);

private:
    struct Range {
        uint64_t base, bytes;
    };
    std::vector<std::vector<Range>> free_;  // per DIMM
    const RedundancyLayout& layout_;
};

class RedundancyController {
public:
    RedundancyController(const ControllerConfig& cfg, const RedundancyLayout& layout,
                         NvmDevice& nvm, CacheHierarchy& hier, AccessCounters& counters);

    ControllerMode mode() const { return cfg_.mode; }
    const ControllerConfig& config() const { return cfg_; }
    SetAssocCache& on_controller_cache() { return ctrl_cache_; }
    DiffStore& diff_store() { return diffs_; }

    // --- DAX mapping table -------------------------------------------------
    void map_file(uint64_t first_logical_page, uint64_t page_count, uint32_t thread);
    void unmap_file(uint64_t first_logical_page, uint32_t thread);
    void unmap_all(uint32_t thread);
    const DaxMapping* mapping_of(uint64_t addr) const;  // null if not DAX-mapped
    bool is_mapped(uint64_t addr) const { return mapping_of(addr) != nullptr; }
    const std::vector<DaxMapping>& mappings() const { return mappings_; }

    // --- data path ----------------------------------------------------------
    // LLC miss: fetch (and for DAX lines verify) one line.
    CacheLine fill(uint64_t addr, uint32_t thread, uint64_t ordinal);

    // LLC eviction of a data line. llc_old is the line's LLC content before
    // any upper-level merge; was_dirty its LLC dirty bit.
    void writeback(uint64_t addr, const CacheLine& new_content, const CacheLine& llc_old,
                   bool was_dirty, uint32_t thread);

    // A line turns dirty in the LLC (dirty L2 victim landing): fold the diff.
    void dirty_install(uint64_t addr, const CacheLine& llc_old, const CacheLine& new_content,
                       uint32_t thread);

    // Evict an LLC data line through the proper write-back path: merge upper
    // copies, write back if dirty. The line must already be removed from
    // (or about to be removed from) the LLC by the caller.
    void complete_eviction(uint64_t addr, const CacheLine& llc_content, bool llc_dirty,
                           uint32_t thread);

    // Flush dirty redundancy lines (on-controller cache + LLC partition).
    void flush_redundancy(uint32_t thread, bool invalidate);

    // Evict all LLC data lines belonging to a logical page range.
    void evict_data_range(uint64_t first_logical_page, uint64_t page_count, uint32_t thread);

    // --- recovery -----------------------------------------------------------
    bool recover_page(uint64_t page_addr, uint32_t thread);

    const std::vector<CorruptionEvent>& detections() const { return detections_; }
    const std::set<size_t>& detected_fault_indices() const { return detected_faults_; }
    uint64_t recoveries_succeeded() const { return recoveries_ok_; }
    uint64_t recoveries_failed() const { return recoveries_failed_; }
    // Verifications that passed although the medium served corrupt data.
    uint64_t missed_detections() const { return missed_; }

    // --- software baselines ---------------------------------------------------
    using AccessFn = std::function<void(uint32_t thread, bool is_store, uint64_t addr,
                                        const CacheLine& payload)>;
    using ValueFn = std::function<CacheLine(uint64_t addr)>;

    void txb_note_store(uint32_t thread, uint64_t addr, const CacheLine& old_value,
                        const CacheLine& new_value);
    void txb_commit(uint32_t thread, const AccessFn& access, const ValueFn& value);
    bool txb_pending(uint32_t thread) const { return !txb_[thread].order.empty(); }

    bool caches_redundancy() const { return cfg_.mode == ControllerMode::EVU; }
    bool verifies_reads() const {
        return cfg_.mode == ControllerMode::Naive || cfg_.mode == ControllerMode::EV ||
               cfg_.mode == ControllerMode::EVU;
    }

private:
    NvmClass class_by_address(uint64_t addr) const;
    const PageGeometry& geom() const { return layout_.geometry(); }
    uint64_t page_of(uint64_t addr) const { return addr / geom().page_size * geom().page_size; }

    // EVU redundancy-line access through on-controller cache, LLC partition,
    // then NVM. One on-controller hit or miss per call.
    SetAssocCache* redundancy_locate(uint64_t line_addr, uint32_t thread);
    uint32_t redundancy_read_u32(uint64_t entry_addr, uint32_t thread);
    void redundancy_rmw(uint64_t line_addr,
                        const std::function<void(CacheLine&)>& mutate, uint32_t thread);
    void spill_to_llc(const EvictedLine& victim, uint32_t thread);
    void invalidate_cached_redundancy(uint64_t base, uint64_t bytes);

    // Line-level RMW of a redundancy line straight at NVM (Naive/EV).
    void nvm_rmw(uint64_t line_addr, const std::function<void(CacheLine&)>& mutate,
                 uint32_t thread);

    void update_redundancy_for_write(uint64_t addr, const CacheLine& new_content,
                                     const CacheLine& diff, const DaxMapping& m,
                                     uint32_t thread);
    void poison(uint64_t line_addr);
    void mark_scope_detected(uint64_t scope_base, uint64_t scope_bytes,
                             const std::vector<size_t>& misdirected_fired);
    struct VerifyResult {
        CacheLine content;
        bool ok;
        uint32_t expected, computed;
        std::vector<size_t> misdirected_fired;
        bool any_corrupt_in_scope;
        uint64_t scope_base, scope_bytes;
    };
    VerifyResult verify_fill_once(uint64_t addr, const DaxMapping& m, uint32_t thread);

    ControllerConfig cfg_;
    const RedundancyLayout& layout_;
    NvmDevice& nvm_;
    CacheHierarchy& hier_;
    AccessCounters& counters_;
    SetAssocCache ctrl_cache_;
    DiffStore diffs_;
    ArenaAllocator arena_;
    std::vector<CrcShiftOp> shift_ops_;  // per line offset within a page
    std::vector<DaxMapping> mappings_;  // sorted by first_logical_page

    std::vector<CorruptionEvent> detections_;
    std::set<size_t> detected_faults_;
    std::unordered_map<uint64_t, std::vector<size_t>> poisoned_;
    uint64_t recoveries_ok_ = 0, recoveries_failed_ = 0, missed_ = 0;

    struct TxnState {
        std::unordered_map<uint64_t, CacheLine> diffs;  // line -> folded old^new
        std::vector<uint64_t> order;                    // first-dirtied order
        bool in_commit = false;
    };
    std::vector<TxnState> txb_;
};

}  // namespace nvred
