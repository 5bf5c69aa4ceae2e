#include "nvred/config.hpp"

#include <fstream>
#include <stdexcept>

namespace nvred {
namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    throw std::invalid_argument("config: " + path + ": " + why);
}

template <typename T>
void read_field(const Json& j, const std::string& path, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const std::exception& e) {
        bad_field(path + "." + key, e.what());
    }
}

void read_cache(const Json& j, const std::string& path, CacheLevelConfig& c) {
    read_field(j, path, "capacity", c.capacity);
    read_field(j, path, "associativity", c.associativity);
    read_field(j, path, "latency_cycles", c.latency_cycles);
    read_field(j, path, "energy_hit_pj", c.energy_hit_pj);
    read_field(j, path, "energy_miss_pj", c.energy_miss_pj);
    try {
        c.validate();
    } catch (const std::exception& e) {
        bad_field(path, e.what());
    }
}

Json cache_json(const CacheLevelConfig& c) {
    Json j;
    j["capacity"] = c.capacity;
    j["associativity"] = c.associativity;
    j["latency_cycles"] = c.latency_cycles;
    j["energy_hit_pj"] = c.energy_hit_pj;
    j["energy_miss_pj"] = c.energy_miss_pj;
    return j;
}

FaultKind fault_kind_from_string(const std::string& s, const std::string& path) {
    if (s == "lost_write") return FaultKind::LostWrite;
    if (s == "misdirected_write") return FaultKind::MisdirectedWrite;
    if (s == "misdirected_read") return FaultKind::MisdirectedRead;
    bad_field(path, "unknown fault kind '" + s +
                        "' (expected lost_write, misdirected_write or misdirected_read)");
}

}  // namespace

void ExperimentConfig::validate() const {
    machine.validate();
    workload.validate();
    if (seeds.empty()) throw std::invalid_argument("config: seeds: at least one seed required");
    if (format != "json" && format != "csv")
        throw std::invalid_argument("config: format: expected json or csv, got '" + format + "'");
    for (size_t i = 0; i < faults.size(); ++i) {
        const FaultSpec& f = faults[i];
        std::string path = "faults[" + std::to_string(i) + "]";
        if (f.file >= workload.threads || f.target_file >= workload.threads)
            bad_field(path, "file index beyond the workload's thread count");
        if (f.line >= workload.lines_per_thread() ||
            (f.kind != FaultKind::LostWrite && f.target_line >= workload.lines_per_thread()))
            bad_field(path, "line index beyond the mapped region");
        if (f.occurrence == 0) bad_field(path, "occurrence ordinals are 1-based");
        if (f.kind != FaultKind::LostWrite && f.file == f.target_file &&
            f.line == f.target_line)
            bad_field(path, "misdirect target must differ from the trigger line");
    }
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    ExperimentConfig c;
    read_field(j, "", "name", c.name);

    if (!j.contains("mode")) bad_field("mode", "required (off, naive, ev, evu, txb-object, txb-page)");
    std::string mode_s = j.at("mode").get<std::string>();
    auto mode = controller_mode_from_string(mode_s);
    if (!mode) bad_field("mode", "unknown mode '" + mode_s + "'");
    c.machine.controller.mode = *mode;

    if (!j.contains("workload") || !j.at("workload").contains("kind"))
        bad_field("workload.kind", "required");
    {
        const Json& w = j.at("workload");
        std::string kind_s = w.at("kind").get<std::string>();
        auto kind = workload_kind_from_string(kind_s);
        if (!kind) bad_field("workload.kind", "unknown workload kind '" + kind_s + "'");
        c.workload.kind = *kind;
        read_field(w, "workload", "threads", c.workload.threads);
        read_field(w, "workload", "region_bytes", c.workload.region_bytes);
        read_field(w, "workload", "txn_size", c.workload.txn_size);
        read_field(w, "workload", "update_fraction", c.workload.update_fraction);
        c.machine.threads = c.workload.threads;
    }

    if (j.contains("machine")) {
        const Json& m = j.at("machine");
        if (m.contains("l1")) read_cache(m.at("l1"), "machine.l1", c.machine.l1);
        if (m.contains("l2")) read_cache(m.at("l2"), "machine.l2", c.machine.l2);
        if (m.contains("llc")) {
            read_cache(m.at("llc"), "machine.llc", c.machine.llc);
            read_field(m.at("llc"), "machine.llc", "redundancy_ways",
                       c.machine.llc_plan.redundancy_ways);
            read_field(m.at("llc"), "machine.llc", "diff_ways", c.machine.llc_plan.diff_ways);
            try {
                c.machine.llc_plan.validate(c.machine.llc.associativity);
            } catch (const std::exception& e) {
                bad_field("machine.llc", e.what());
            }
        }
        if (m.contains("controller_cache"))
            read_cache(m.at("controller_cache"), "machine.controller_cache",
                       c.machine.controller.cache);
        if (m.contains("nvm")) {
            const Json& n = m.at("nvm");
            read_field(n, "machine.nvm", "num_dimms", c.machine.nvm.num_dimms);
            read_field(n, "machine.nvm", "dimm_capacity", c.machine.nvm.dimm_capacity);
            read_field(n, "machine.nvm", "read_latency_ns", c.machine.nvm.read_latency_ns);
            read_field(n, "machine.nvm", "write_latency_ns", c.machine.nvm.write_latency_ns);
            read_field(n, "machine.nvm", "energy_read_nj", c.machine.nvm.energy_read_nj);
            read_field(n, "machine.nvm", "energy_write_nj", c.machine.nvm.energy_write_nj);
            try {
                c.machine.nvm.validate();
            } catch (const std::exception& e) {
                bad_field("machine.nvm", e.what());
            }
        }
        read_field(m, "machine", "object_size", c.machine.controller.object_size);
    }

    read_field(j, "", "recovery_enabled", c.machine.controller.recovery_enabled);
    read_field(j, "", "seeds", c.seeds);
    read_field(j, "", "output", c.output_path);
    read_field(j, "", "format", c.format);

    if (j.contains("faults")) {
        const Json& fs = j.at("faults");
        for (size_t i = 0; i < fs.size(); ++i) {
            const Json& f = fs.at(i);
            std::string path = "faults[" + std::to_string(i) + "]";
            FaultSpec spec;
            spec.kind = fault_kind_from_string(f.at("kind").get<std::string>(), path + ".kind");
            read_field(f, path, "file", spec.file);
            if (!f.contains("line")) bad_field(path + ".line", "required");
            read_field(f, path, "line", spec.line);
            read_field(f, path, "occurrence", spec.occurrence);
            read_field(f, path, "target_file", spec.target_file);
            read_field(f, path, "target_line", spec.target_line);
            c.faults.push_back(spec);
        }
    }

    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config: " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

Json ExperimentConfig::to_json() const {
    Json j;
    j["name"] = name;
    j["mode"] = to_string(machine.controller.mode);
    Json w;
    w["kind"] = to_string(workload.kind);
    w["threads"] = workload.threads;
    w["region_bytes"] = workload.region_bytes;
    w["txn_size"] = workload.txn_size;
    w["update_fraction"] = workload.update_fraction;
    j["workload"] = w;
    Json m;
    m["l1"] = cache_json(machine.l1);
    m["l2"] = cache_json(machine.l2);
    m["llc"] = cache_json(machine.llc);
    m["llc"]["redundancy_ways"] = machine.llc_plan.redundancy_ways;
    m["llc"]["diff_ways"] = machine.llc_plan.diff_ways;
    m["controller_cache"] = cache_json(machine.controller.cache);
    Json n;
    n["num_dimms"] = machine.nvm.num_dimms;
    n["dimm_capacity"] = machine.nvm.dimm_capacity;
    n["read_latency_ns"] = machine.nvm.read_latency_ns;
    n["write_latency_ns"] = machine.nvm.write_latency_ns;
    n["energy_read_nj"] = machine.nvm.energy_read_nj;
    n["energy_write_nj"] = machine.nvm.energy_write_nj;
    m["nvm"] = n;
    m["object_size"] = machine.controller.object_size;
    j["machine"] = m;
    j["recovery_enabled"] = machine.controller.recovery_enabled;
    Json fs = Json::array();
    for (const FaultSpec& f : faults) {
        Json e;
        e["kind"] = to_string(f.kind);
        e["file"] = f.file;
        e["line"] = f.line;
        e["occurrence"] = f.occurrence;
        if (f.kind != FaultKind::LostWrite) {
            e["target_file"] = f.target_file;
            e["target_line"] = f.target_line;
        }
        fs.push_back(e);
    }
    j["faults"] = fs;
    j["seeds"] = seeds;
    j["output"] = output_path;
    j["format"] = format;
    return j;
}

}  // namespace nvred
