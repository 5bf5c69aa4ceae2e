#include "nvred/report.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nvred {

CounterSummary CounterSummary::from(const AccessCounters& c) {
    CounterSummary s;
    s.l1_hits = c.l1_hits();
    s.l1_misses = c.l1_misses();
    s.l2_hits = c.l2_hits();
    s.l2_misses = c.l2_misses();
    s.llc_hits = c.llc_hits();
    s.llc_misses = c.llc_misses();
    s.on_controller_hits = c.on_controller_hits();
    s.on_controller_misses = c.on_controller_misses();
    s.nvm_data_reads = c.nvm_data_reads();
    s.nvm_data_writes = c.nvm_data_writes();
    s.nvm_redundancy_reads = c.nvm_redundancy_reads();
    s.nvm_redundancy_writes = c.nvm_redundancy_writes();
    return s;
}

namespace {

const std::vector<std::pair<const char*, uint64_t CounterSummary::*>> kCounterFields = {
    {"l1_hits", &CounterSummary::l1_hits},
    {"l1_misses", &CounterSummary::l1_misses},
    {"l2_hits", &CounterSummary::l2_hits},
    {"l2_misses", &CounterSummary::l2_misses},
    {"llc_hits", &CounterSummary::llc_hits},
    {"llc_misses", &CounterSummary::llc_misses},
    {"on_controller_hits", &CounterSummary::on_controller_hits},
    {"on_controller_misses", &CounterSummary::on_controller_misses},
    {"nvm_data_reads", &CounterSummary::nvm_data_reads},
    {"nvm_data_writes", &CounterSummary::nvm_data_writes},
    {"nvm_redundancy_reads", &CounterSummary::nvm_redundancy_reads},
    {"nvm_redundancy_writes", &CounterSummary::nvm_redundancy_writes},
};

}  // namespace

Json CounterSummary::to_json() const {
    Json j;
    for (const auto& [name, field] : kCounterFields) j[name] = this->*field;
    return j;
}

CounterSummary CounterSummary::from_json(const Json& j) {
    CounterSummary s;
    for (const auto& [name, field] : kCounterFields) s.*field = j.at(name).get<uint64_t>();
    return s;
}

Json ExperimentReport::to_json() const {
    Json j;
    j["schema_version"] = schema_version;
    j["experiment"] = experiment;
    j["mode"] = mode;
    j["workload"] = workload_kind;
    j["seed"] = seed;
    j["config"] = config_echo;
    j["counters"] = counters.to_json();
    j["setup_counters"] = setup_counters.to_json();
    j["teardown_counters"] = teardown_counters.to_json();
    j["energy_joules"] = energy_joules;
    j["model_runtime_ns"] = model_runtime_ns;
    j["redundancy_read_amplification"] = redundancy_read_amplification;
    Json dets = Json::array();
    for (const auto& d : detections) {
        Json e;
        e["detected_at"] = d.detected_at;
        e["line_addr"] = d.line_addr;
        e["expected_checksum"] = d.expected_checksum;
        e["computed_checksum"] = d.computed_checksum;
        e["recovered"] = d.recovered;
        dets.push_back(e);
    }
    j["detections"] = dets;
    j["recoveries_succeeded"] = recoveries_succeeded;
    j["recoveries_failed"] = recoveries_failed;
    j["missed_detections"] = missed_detections;
    j["audit_ok"] = audit_ok;
    return j;
}

ExperimentReport ExperimentReport::from_json(const Json& j) {
    ExperimentReport r;
    r.schema_version = j.at("schema_version").get<int>();
    r.experiment = j.at("experiment").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.workload_kind = j.at("workload").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.config_echo = j.at("config");
    r.counters = CounterSummary::from_json(j.at("counters"));
    r.setup_counters = CounterSummary::from_json(j.at("setup_counters"));
    r.teardown_counters = CounterSummary::from_json(j.at("teardown_counters"));
    r.energy_joules = j.at("energy_joules").get<double>();
    r.model_runtime_ns = j.at("model_runtime_ns").get<double>();
    r.redundancy_read_amplification = j.at("redundancy_read_amplification").get<double>();
    for (const auto& e : j.at("detections")) {
        CorruptionEvent d;
        d.detected_at = e.at("detected_at").get<uint64_t>();
        d.line_addr = e.at("line_addr").get<uint64_t>();
        d.expected_checksum = e.at("expected_checksum").get<uint32_t>();
        d.computed_checksum = e.at("computed_checksum").get<uint32_t>();
        d.recovered = e.at("recovered").get<bool>();
        r.detections.push_back(d);
    }
    r.recoveries_succeeded = j.at("recoveries_succeeded").get<uint64_t>();
    r.recoveries_failed = j.at("recoveries_failed").get<uint64_t>();
    r.missed_detections = j.at("missed_detections").get<uint64_t>();
    r.audit_ok = j.at("audit_ok").get<bool>();
    return r;
}

bool ExperimentReport::operator==(const ExperimentReport& o) const {
    return to_json() == o.to_json();
}

namespace {

std::map<std::string, double> report_metrics(const ExperimentReport& r) {
    std::map<std::string, double> m;
    for (const auto& [name, field] : kCounterFields)
        m[name] = double(r.counters.*field);
    m["nvm_reads"] = double(r.counters.nvm_reads());
    m["nvm_writes"] = double(r.counters.nvm_writes());
    m["nvm_total"] = double(r.counters.nvm_total());
    m["nvm_redundancy_total"] = double(r.counters.nvm_redundancy_total());
    m["cache_accesses"] = double(r.counters.cache_accesses());
    m["total_traffic"] = double(r.counters.total_traffic());
    m["energy_joules"] = r.energy_joules;
    m["model_runtime_ns"] = r.model_runtime_ns;
    m["redundancy_read_amplification"] = r.redundancy_read_amplification;
    m["detections"] = double(r.detections.size());
    m["recoveries_succeeded"] = double(r.recoveries_succeeded);
    m["recoveries_failed"] = double(r.recoveries_failed);
    m["missed_detections"] = double(r.missed_detections);
    m["audit_ok"] = r.audit_ok ? 1.0 : 0.0;
    return m;
}

}  // namespace

OverheadSummary compare(const ExperimentReport& report, const ExperimentReport& baseline) {
    if (report.workload_kind != baseline.workload_kind || report.seed != baseline.seed)
        throw std::invalid_argument(
            "compare: reports must share workload kind and seed (got " +
            report.workload_kind + "/" + std::to_string(report.seed) + " vs " +
            baseline.workload_kind + "/" + std::to_string(baseline.seed) + ")");
    OverheadSummary out;
    auto a = report_metrics(report), b = report_metrics(baseline);
    for (const auto& [name, value] : a) {
        double base = b.at(name);
        out.deltas[name] = value - base;
        if (base != 0) out.ratios[name] = value / base;
        else if (value == 0) out.ratios[name] = 1.0;
        // metric absent in the baseline and present now: no finite ratio
    }
    return out;
}

Json OverheadSummary::to_json() const {
    Json j;
    j["ratios"] = ratios;
    j["deltas"] = deltas;
    return j;
}

const char* kCsvHeader = "experiment,mode,metric,value";

void emit_csv(const ExperimentReport& report, std::ostream& out, bool with_header) {
    if (with_header) out << kCsvHeader << "\n";
    Json row_base;
    auto metrics = report_metrics(report);
    metrics["seed"] = double(report.seed);
    for (const auto& [name, value] : metrics) {
        out << report.experiment << "," << report.mode << "," << name << ","
            << Json(value).dump() << "\n";
    }
}

void emit(const ExperimentReport& report, const std::string& format, std::ostream& out) {
    if (format == "json") out << report.to_json().dump(2) << "\n";
    else if (format == "csv") emit_csv(report, out, true);
    else throw std::invalid_argument("unknown report format: " + format);
}

Json summarize(const std::vector<ExperimentReport>& reports) {
    Json j;
    if (reports.empty()) return j;
    std::map<std::string, std::vector<double>> series;
    for (const auto& r : reports)
        for (const auto& [name, value] : report_metrics(r)) series[name].push_back(value);
    j["seeds"] = Json::array();
    for (const auto& r : reports) j["seeds"].push_back(r.seed);
    Json metrics;
    for (const auto& [name, values] : series) {
        double mean = 0;
        for (double v : values) mean += v;
        mean /= double(values.size());
        double var = 0;
        for (double v : values) var += (v - mean) * (v - mean);
        double rms = std::sqrt(var / double(values.size()));
        Json m;
        m["mean"] = mean;
        m["rms_error"] = rms;
        metrics[name] = m;
    }
    j["metrics"] = metrics;
    return j;
}

}  // namespace nvred
