// workload.hpp - Deterministic, seeded access-stream generators shaped after
// common NVM application patterns: fio-style sequential/random sweeps where
// no line is touched twice, the four stream kernels, a skewed key-value
// update mix (90% of operations on 10% of the keys), and an append-only log
// with an allocator-shuffled placement.
//
// Generation is pure: identical (spec, seed) gives byte-identical streams.
// Events carry region-relative line indices; callers translate to physical
// addresses through their mapping. Threads interleave round-robin.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nvred/lines.hpp"

namespace nvred {

enum class WorkloadKind : uint8_t {
    SeqRead,
    SeqWrite,
    RandRead,
    RandWrite,
    StreamCopy,
    StreamScale,
    StreamAdd,
    StreamTriad,
    KvSkewed,
    LogAppend,
};

const char* to_string(WorkloadKind k);
std::optional<WorkloadKind> workload_kind_from_string(const std::string& s);

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::SeqRead;
    uint32_t threads = 12;
    uint64_t region_bytes = 16ull << 20;  // per thread
    uint64_t seed = 1;
    uint64_t txn_size = 1;          // accesses per transaction
    double update_fraction = 0.5;   // KvSkewed store probability

    uint64_t lines_per_thread() const { return region_bytes / kLineSize; }
    void validate() const;
};

// Fraction of keys that form the hot set and fraction of operations sent
// to it (skewed key-value shape).
inline constexpr double kKvHotKeyFraction = 0.1;
inline constexpr double kKvHotOpsFraction = 0.9;

struct RawEvent {
    uint32_t thread = 0;
    bool is_store = false;
    uint64_t region_line = 0;  // line index within the thread's region
    CacheLine payload{};       // stores only
    bool txn_boundary = false;
};

class WorkloadGenerator {
public:
    explicit WorkloadGenerator(const WorkloadSpec& spec);

    // Initialization stream (source-array stores for the stream kernels);
    // runs before measurement. Returns false when exhausted.
    bool next_setup(RawEvent& out);

    // Measured stream, round-robin across threads.
    bool next(RawEvent& out);

    uint64_t measured_events_per_thread() const { return per_thread_events_; }

private:
    struct ThreadState {
        uint64_t pos = 0;                 // event index within the thread
        std::vector<uint32_t> perm;       // random orders where needed
        std::vector<uint32_t> keys;       // KvSkewed shuffled key space
    };

    bool thread_event(uint32_t t, uint64_t pos, RawEvent& out) const;
    CacheLine stored_value(uint32_t t, uint64_t region_line) const;

    WorkloadSpec spec_;
    uint64_t lines_;
    uint64_t per_thread_events_ = 0;
    uint64_t setup_per_thread_ = 0;
    std::vector<ThreadState> threads_;
    uint64_t setup_cursor_ = 0;
    uint64_t cursor_ = 0;
};

}  // namespace nvred
