// nvm.hpp - Byte-addressable multi-DIMM NVM back-end.
//
// Media content is stored sparsely at page granularity; untouched pages
// materialize with their formatted content (zero data/parity, checksum
// regions pre-filled with the checksum of zeroed coverage) so that the
// redundancy state is consistent from the first access.
//
// Firmware-bug fault injection hooks live on the read/write path: a lost
// write acknowledges without touching media, a misdirected write lands on
// the wrong line, a misdirected read returns the wrong line's content.
// Each schedule entry triggers on the Nth matching operation at its target
// address and fires at most once.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "nvred/counters.hpp"
#include "nvred/layout.hpp"
#include "nvred/lines.hpp"

namespace nvred {

struct NvmConfig {
    uint32_t num_dimms = 4;
    uint64_t dimm_capacity = 128ull << 20;
    double read_latency_ns = 60;
    double write_latency_ns = 150;
    double energy_read_nj = 1.6;
    double energy_write_nj = 9;

    void validate() const;
};

enum class FaultKind : uint8_t { LostWrite, MisdirectedWrite, MisdirectedRead };

const char* to_string(FaultKind kind);

struct FaultScheduleEntry {
    FaultKind kind = FaultKind::LostWrite;
    uint64_t target_line = 0;
    uint32_t occurrence = 1;        // fires on the Nth matching op at target_line
    uint64_t misdirect_target = 0;  // misdirected kinds only
    bool armed = true;

    void validate() const;
};

struct FiredFault {
    size_t schedule_index;
    FaultKind kind;
    uint64_t target_line;
    uint64_t misdirect_target;
    uint64_t fired_at_op;  // global NVM operation ordinal
};

enum class NvmClass : uint8_t { Data, Redundancy };

struct NvmReadResult {
    CacheLine data;
    bool misdirected = false;  // this particular read was served from the wrong line
};

class NvmDevice {
public:
    NvmDevice(const RedundancyLayout& layout, const NvmConfig& cfg,
              AccessCounters* counters);

    const NvmConfig& config() const { return cfg_; }

    // Object-checksum region formatting; entries repeat every
    // `slot_stride` 4-byte slots (object_size / line_size).
    void set_objcsum_format(uint32_t fill, uint32_t slot_stride);

    void arm(std::vector<FaultScheduleEntry> schedule);
    const std::vector<FaultScheduleEntry>& schedule() const { return schedule_; }
    const std::vector<FiredFault>& fired_faults() const { return fired_; }

    // Per-address operation ordinals cost a map update per media access, so
    // they are kept only when fault injection is in play: arming a schedule
    // enables tracking, and runs that arm later (with occurrence ordinals
    // relative to a timeline point) must enable it up front.
    void enable_op_tracking() { track_ops_ = true; }
    bool op_tracking() const { return track_ops_; }

    // Operation ordinals seen so far at an address.
    uint32_t reads_at(uint64_t line_addr) const {
        auto it = read_ops_.find(line_addr);
        return it == read_ops_.end() ? 0 : it->second;
    }
    uint32_t writes_at(uint64_t line_addr) const {
        auto it = write_ops_.find(line_addr);
        return it == write_ops_.end() ? 0 : it->second;
    }

    // Counted media accesses (the simulation data path).
    NvmReadResult read_line(uint64_t line_addr, NvmClass cls, uint32_t thread);
    void write_line(uint64_t line_addr, const CacheLine& content, NvmClass cls,
                    uint32_t thread);

    // Uncounted, fault-free accessors for formatting, audits and tests.
    CacheLine peek_line(uint64_t line_addr) const;
    void poke_line(uint64_t line_addr, const CacheLine& content);
    uint32_t peek_u32(uint64_t addr) const;
    void poke_u32(uint64_t addr, uint32_t value);

    // Lines whose media content is stale or foreign due to a fired fault
    // and not yet rewritten; maps to indices into fired_faults().
    const std::unordered_map<uint64_t, std::vector<size_t>>& corrupted_lines() const {
        return corrupted_;
    }
    bool line_is_corrupted(uint64_t line_addr) const {
        return corrupted_.count(line_addr) != 0;
    }

private:
    uint8_t* page_for(uint64_t addr, bool materialize);
    void format_page(uint64_t page_base, uint8_t* bytes) const;
    void check_mapped(uint64_t line_addr) const;
    void store(uint64_t line_addr, const CacheLine& content);
    CacheLine load(uint64_t line_addr) const;
    void mark_corrupted(uint64_t line_addr, size_t fired_index);

    const RedundancyLayout& layout_;
    NvmConfig cfg_;
    AccessCounters* counters_;
    uint64_t ops_ = 0;
    uint32_t syscsum_fill_;
    uint32_t objcsum_fill_;
    uint32_t objcsum_stride_ = 1;
    mutable std::unordered_map<uint64_t, std::unique_ptr<uint8_t[]>> pages_;
    bool track_ops_ = false;
    std::vector<FaultScheduleEntry> schedule_;
    std::vector<FiredFault> fired_;
    // (kind-agnostic) op counts per target address, split read/write
    std::unordered_map<uint64_t, uint32_t> write_ops_;
    std::unordered_map<uint64_t, uint32_t> read_ops_;
    std::unordered_map<uint64_t, std::vector<size_t>> corrupted_;
};

}  // namespace nvred
