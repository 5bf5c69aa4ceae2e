// experiment.hpp - Runs experiments end to end: builds the machine, maps one
// file per workload lane at stripe- and checksum-line-aligned offsets
// (lanes never write-share a cache line), feeds the setup and measurement
// streams, arms the fault schedule relative to the measurement phase, and
// collects reports. The access stream depends only on (workload, seed),
// never on the mode: fixed work across designs.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nvred/config.hpp"
#include "nvred/report.hpp"

namespace nvred {

struct RunResult {
    std::vector<ExperimentReport> reports;  // one per seed
    Json summary;                           // per-metric mean and rms error
    bool undetected_corruption = false;     // detection promised but missed
};

RunResult run_experiment(const ExperimentConfig& cfg);

enum class SweepAxis { Mode, RedundancyWays, DiffWays, NumDimms, NvmLatency };

const char* to_string(SweepAxis axis);
std::optional<SweepAxis> sweep_axis_from_string(const std::string& s);

struct SweepPoint {
    std::string label;
    RunResult result;
};

struct SweepResult {
    SweepAxis axis;
    std::vector<SweepPoint> points;
};

SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis);

Json sweep_to_json(const SweepResult& sweep);
void emit_sweep_csv(const SweepResult& sweep, std::ostream& out);

}  // namespace nvred
