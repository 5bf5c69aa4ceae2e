// report.hpp - Experiment reports: the measured counters split by phase,
// accrued energy and model runtime, detection/recovery events, and derived
// ratios. Serializes to a versioned JSON schema (lossless round-trip) and
// to a tidy CSV (experiment, mode, metric, value).
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nvred/controller.hpp"
#include "nvred/counters.hpp"

namespace nvred {

using Json = nlohmann::ordered_json;

struct CounterSummary {
    uint64_t l1_hits = 0, l1_misses = 0;
    uint64_t l2_hits = 0, l2_misses = 0;
    uint64_t llc_hits = 0, llc_misses = 0;
    uint64_t on_controller_hits = 0, on_controller_misses = 0;
    uint64_t nvm_data_reads = 0, nvm_data_writes = 0;
    uint64_t nvm_redundancy_reads = 0, nvm_redundancy_writes = 0;

    static CounterSummary from(const AccessCounters& c);
    uint64_t nvm_reads() const { return nvm_data_reads + nvm_redundancy_reads; }
    uint64_t nvm_writes() const { return nvm_data_writes + nvm_redundancy_writes; }
    uint64_t nvm_total() const { return nvm_reads() + nvm_writes(); }
    uint64_t nvm_redundancy_total() const {
        return nvm_redundancy_reads + nvm_redundancy_writes;
    }
    uint64_t cache_accesses() const {
        return l1_hits + l1_misses + l2_hits + l2_misses + llc_hits + llc_misses +
               on_controller_hits + on_controller_misses;
    }
    uint64_t total_traffic() const { return cache_accesses() + nvm_total(); }

    Json to_json() const;
    static CounterSummary from_json(const Json& j);
    bool operator==(const CounterSummary&) const = default;
};

struct ExperimentReport {
    int schema_version = 1;
    std::string experiment;
    std::string mode;
    std::string workload_kind;
    uint64_t seed = 0;
    Json config_echo;  // resolved effective configuration
    CounterSummary counters;           // measurement phase
    CounterSummary setup_counters;     // mapping + initialization
    CounterSummary teardown_counters;  // final drain + unmap
    double energy_joules = 0;
    double model_runtime_ns = 0;
    double redundancy_read_amplification = 0;  // NVM reads per data read
    std::vector<CorruptionEvent> detections;
    uint64_t recoveries_succeeded = 0;
    uint64_t recoveries_failed = 0;
    uint64_t missed_detections = 0;
    bool audit_ok = true;

    Json to_json() const;
    static ExperimentReport from_json(const Json& j);
    bool operator==(const ExperimentReport&) const;
};

// Per-metric mode/baseline ratios and absolute deltas. Requires matching
// workload kind and seed.
struct OverheadSummary {
    std::map<std::string, double> ratios;
    std::map<std::string, double> deltas;
    Json to_json() const;
};

OverheadSummary compare(const ExperimentReport& report, const ExperimentReport& baseline);

// Flat (experiment, mode, metric, value) rows for external plotting.
extern const char* kCsvHeader;
void emit_csv(const ExperimentReport& report, std::ostream& out, bool with_header);
void emit(const ExperimentReport& report, const std::string& format, std::ostream& out);

// Mean and root-mean-square error of each numeric metric across seeds.
Json summarize(const std::vector<ExperimentReport>& reports);

}  // namespace nvred
