#include "nvred/experiment.hpp"

#include <ostream>

#include "nvred/audit.hpp"
#include "nvred/machine.hpp"
#include "nvred/workload.hpp"

namespace nvred {
namespace {

struct FilePlacement {
    std::vector<uint64_t> base_page;  // per thread
    uint64_t pages_per_thread;
};

FilePlacement place_files(const RedundancyLayout& layout, const WorkloadSpec& w) {
    FilePlacement p;
    const uint64_t page = layout.geometry().page_size;
    p.pages_per_thread = w.region_bytes / page;
    uint64_t align = layout.file_alignment_pages();
    uint64_t stride = (p.pages_per_thread + align - 1) / align * align;
    if (uint64_t(w.threads) * stride > layout.total_data_pages())
        throw std::invalid_argument(
            "config: workload.region_bytes: " + std::to_string(w.threads) + " regions of " +
            std::to_string(w.region_bytes) +
            " bytes do not fit the NVM data capacity; raise machine.nvm.dimm_capacity");
    for (uint32_t t = 0; t < w.threads; ++t) p.base_page.push_back(t * stride);
    return p;
}

ExperimentReport run_one(const ExperimentConfig& cfg, uint64_t seed) {
    Machine machine(cfg.machine);
    // Faults arm after setup with occurrence ordinals relative to the
    // measurement phase; ordinal tracking must cover setup operations.
    if (!cfg.faults.empty()) machine.device().enable_op_tracking();
    const RedundancyLayout& layout = machine.layout();
    const uint64_t lpp = layout.geometry().lines_per_page();

    WorkloadSpec wl = cfg.workload;
    wl.seed = seed;
    FilePlacement files = place_files(layout, wl);
    auto addr_of = [&](uint32_t thread, uint64_t region_line) {
        uint64_t page = files.base_page[thread] + region_line / lpp;
        return layout.data_page_addr(page) + (region_line % lpp) * kLineSize;
    };

    // Setup: map one file per lane, run initialization, start cold.
    for (uint32_t t = 0; t < wl.threads; ++t)
        machine.map_file(files.base_page[t], files.pages_per_thread);
    WorkloadGenerator gen(wl);
    RawEvent ev;
    while (gen.next_setup(ev))
        machine.access(ev.thread, ev.is_store, addr_of(ev.thread, ev.region_line), ev.payload,
                       ev.txn_boundary);
    machine.drain();

    // Fault triggers count operations from here on.
    std::vector<FaultScheduleEntry> schedule;
    for (const FaultSpec& f : cfg.faults) {
        FaultScheduleEntry e;
        e.kind = f.kind;
        e.target_line = addr_of(f.file, f.line);
        e.occurrence = f.occurrence + (f.kind == FaultKind::MisdirectedRead
                                           ? machine.device().reads_at(e.target_line)
                                           : machine.device().writes_at(e.target_line));
        if (f.kind != FaultKind::LostWrite)
            e.misdirect_target = addr_of(f.target_file, f.target_line);
        schedule.push_back(e);
    }
    machine.device().arm(std::move(schedule));

    machine.set_phase(Phase::Measure);
    while (gen.next(ev))
        machine.access(ev.thread, ev.is_store, addr_of(ev.thread, ev.region_line), ev.payload,
                       ev.txn_boundary);

    machine.set_phase(Phase::Teardown);
    machine.drain();
    machine.unmap_all();
    AuditReport audit = audit_redundancy(machine);

    ExperimentReport r;
    r.experiment = cfg.name;
    r.mode = to_string(cfg.machine.controller.mode);
    r.workload_kind = to_string(wl.kind);
    r.seed = seed;
    r.config_echo = cfg.to_json();
    r.counters = CounterSummary::from(machine.counters(Phase::Measure));
    r.setup_counters = CounterSummary::from(machine.counters(Phase::Setup));
    r.teardown_counters = CounterSummary::from(machine.counters(Phase::Teardown));
    Accrual acc = accrue(machine.counters(Phase::Measure), cfg.machine.timing());
    r.energy_joules = acc.energy_joules;
    r.model_runtime_ns = acc.model_runtime_ns;
    r.redundancy_read_amplification =
        r.counters.nvm_data_reads
            ? double(r.counters.nvm_reads()) / double(r.counters.nvm_data_reads)
            : 0.0;
    r.detections = machine.controller().detections();
    r.recoveries_succeeded = machine.controller().recoveries_succeeded();
    r.recoveries_failed = machine.controller().recoveries_failed();
    r.missed_detections = machine.controller().missed_detections();
    r.audit_ok = audit.ok;
    return r;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    RunResult out;
    for (uint64_t seed : cfg.seeds) out.reports.push_back(run_one(cfg, seed));
    out.summary = summarize(out.reports);
    bool verifying = cfg.machine.controller.mode == ControllerMode::Naive ||
                     cfg.machine.controller.mode == ControllerMode::EV ||
                     cfg.machine.controller.mode == ControllerMode::EVU;
    for (const auto& r : out.reports)
        if (verifying && r.missed_detections > 0) out.undetected_corruption = true;
    return out;
}

const char* to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Mode: return "mode";
        case SweepAxis::RedundancyWays: return "redundancy_ways";
        case SweepAxis::DiffWays: return "diff_ways";
        case SweepAxis::NumDimms: return "num_dimms";
        case SweepAxis::NvmLatency: return "nvm_latency";
    }
    return "?";
}

std::optional<SweepAxis> sweep_axis_from_string(const std::string& s) {
    for (SweepAxis a : {SweepAxis::Mode, SweepAxis::RedundancyWays, SweepAxis::DiffWays,
                        SweepAxis::NumDimms, SweepAxis::NvmLatency})
        if (s == to_string(a)) return a;
    return std::nullopt;
}

SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis) {
    SweepResult out;
    out.axis = axis;
    auto add = [&](const std::string& label, const ExperimentConfig& cfg) {
        cfg.validate();
        out.points.push_back({label, run_experiment(cfg)});
    };
    switch (axis) {
        case SweepAxis::Mode:
            for (ControllerMode m :
                 {ControllerMode::Off, ControllerMode::Naive, ControllerMode::EV,
                  ControllerMode::EVU, ControllerMode::TxBObject, ControllerMode::TxBPage}) {
                ExperimentConfig cfg = base;
                cfg.machine.controller.mode = m;
                add(to_string(m), cfg);
            }
            break;
        case SweepAxis::RedundancyWays:
            for (uint32_t v = 1; v <= 8; ++v) {
                ExperimentConfig cfg = base;
                cfg.machine.llc_plan.redundancy_ways = v;
                cfg.machine.llc_plan.validate(cfg.machine.llc.associativity);
                add("redundancy_ways=" + std::to_string(v), cfg);
            }
            break;
        case SweepAxis::DiffWays:
            for (uint32_t v = 1; v <= 8; ++v) {
                ExperimentConfig cfg = base;
                cfg.machine.llc_plan.diff_ways = v;
                cfg.machine.llc_plan.validate(cfg.machine.llc.associativity);
                add("diff_ways=" + std::to_string(v), cfg);
            }
            break;
        case SweepAxis::NumDimms:
            for (uint32_t v : {4u, 6u, 8u}) {
                ExperimentConfig cfg = base;
                cfg.machine.nvm.num_dimms = v;
                add("num_dimms=" + std::to_string(v), cfg);
            }
            break;
        case SweepAxis::NvmLatency:
            for (auto [r, w] : {std::pair<double, double>{60, 150}, {15, 15}, {120, 300}}) {
                ExperimentConfig cfg = base;
                cfg.machine.nvm.read_latency_ns = r;
                cfg.machine.nvm.write_latency_ns = w;
                add("nvm=" + std::to_string(int(r)) + "/" + std::to_string(int(w)) + "ns", cfg);
            }
            break;
    }
    return out;
}

Json sweep_to_json(const SweepResult& sweep) {
    Json j;
    j["axis"] = to_string(sweep.axis);
    Json points = Json::array();
    for (const auto& p : sweep.points) {
        Json q;
        q["label"] = p.label;
        Json reports = Json::array();
        for (const auto& r : p.result.reports) reports.push_back(r.to_json());
        q["reports"] = reports;
        q["summary"] = p.result.summary;
        points.push_back(q);
    }
    j["points"] = points;
    return j;
}

void emit_sweep_csv(const SweepResult& sweep, std::ostream& out) {
    out << kCsvHeader << "\n";
    for (const auto& p : sweep.points) {
        for (const auto& r : p.result.reports) {
            ExperimentReport labeled = r;
            labeled.experiment = r.experiment + "/" + p.label;
            emit_csv(labeled, out, false);
        }
    }
}

}  // namespace nvred
