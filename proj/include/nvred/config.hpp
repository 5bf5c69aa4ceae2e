// config.hpp - Declarative experiment configuration. All machine parameters
// default to the simulated-system table (12 threads with 32KB/8-way L1 and
// 256KB/8-way L2, 24MB/16-way inclusive LLC with 2 redundancy and 1 diff
// way, 4KB on-controller cache, 4 NVM DIMMs at 60/150ns and 1.6/9nJ), so a
// minimal config names only the workload kind and the mode. Parsed from
// JSON with field-level error messages; fully resolved before any
// simulation starts.
#pragma once

#include <string>
#include <vector>

#include "nvred/machine.hpp"
#include "nvred/report.hpp"
#include "nvred/workload.hpp"

namespace nvred {

// Fault triggers address a (file, line) pair: file f is the region mapped
// for thread f, line the 64-byte index within it. Occurrence ordinals count
// matching operations from the start of the measurement phase.
struct FaultSpec {
    FaultKind kind = FaultKind::LostWrite;
    uint32_t file = 0;
    uint64_t line = 0;
    uint32_t occurrence = 1;
    uint32_t target_file = 0;  // misdirected kinds
    uint64_t target_line = 0;
};

struct ExperimentConfig {
    std::string name = "experiment";
    MachineConfig machine = MachineConfig::defaults();
    WorkloadSpec workload;
    std::vector<FaultSpec> faults;
    std::vector<uint64_t> seeds{1};
    std::string output_path;       // empty: stdout
    std::string format = "json";   // json | csv

    void validate() const;
    Json to_json() const;

    // Throws std::invalid_argument with a dotted field path on bad input.
    static ExperimentConfig from_json(const Json& j);
    static ExperimentConfig from_file(const std::string& path);
};

}  // namespace nvred
