#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "nvred/report.hpp"

using namespace nvred;

namespace {

ExperimentReport sample_report(uint64_t seed, std::mt19937_64& rng) {
    ExperimentReport r;
    r.experiment = "sample";
    r.mode = "evu";
    r.workload_kind = "seq_write";
    r.seed = seed;
    r.config_echo = Json{{"name", "sample"}};
    auto fill = [&](CounterSummary& c) {
        c.l1_hits = rng() % 100000;
        c.l1_misses = rng() % 10000;
        c.l2_hits = rng() % 10000;
        c.l2_misses = rng() % 10000;
        c.llc_hits = rng() % 10000;
        c.llc_misses = rng() % 10000;
        c.on_controller_hits = rng() % 1000;
        c.on_controller_misses = rng() % 1000;
        c.nvm_data_reads = rng() % 100000;
        c.nvm_data_writes = rng() % 100000;
        c.nvm_redundancy_reads = rng() % 10000;
        c.nvm_redundancy_writes = rng() % 10000;
    };
    fill(r.counters);
    fill(r.setup_counters);
    fill(r.teardown_counters);
    // Awkward doubles exercise the full-precision round-trip.
    r.energy_joules = 1.6e-9 * double(rng() % 1000000) + 0.1 / 3.0;
    r.model_runtime_ns = double(rng()) / 7.0;
    r.redundancy_read_amplification = 65.0 / 63.0;
    r.detections.push_back({rng(), rng(), uint32_t(rng()), uint32_t(rng()), true});
    r.recoveries_succeeded = 1;
    return r;
}

}  // namespace

TEST_CASE("json round-trip is lossless") {
    std::mt19937_64 rng(0x3e90);
    for (int i = 0; i < 50; ++i) {
        ExperimentReport r = sample_report(i, rng);
        // Through text, not just the DOM: full numeric precision must survive.
        std::string text = r.to_json().dump();
        ExperimentReport back = ExperimentReport::from_json(Json::parse(text));
        CHECK(back == r);
        CHECK(back.energy_joules == r.energy_joules);
        CHECK(back.model_runtime_ns == r.model_runtime_ns);
    }
}

TEST_CASE("csv header matches the documented schema") {
    std::mt19937_64 rng(0x3e91);
    ExperimentReport r = sample_report(1, rng);
    std::ostringstream out;
    emit(r, "csv", out);
    std::string first = out.str().substr(0, out.str().find('\n'));
    CHECK(first == "experiment,mode,metric,value");
    CHECK(std::string(kCsvHeader) == first);
    // Every row has exactly four columns.
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line))
        CHECK(std::count(line.begin(), line.end(), ',') == 3);
}

TEST_CASE("compare: a report against itself gives all-ones ratios") {
    std::mt19937_64 rng(0x3e92);
    ExperimentReport r = sample_report(7, rng);
    auto cmp = compare(r, r);
    for (const auto& [name, ratio] : cmp.ratios) {
        INFO(name);
        CHECK(ratio == doctest::Approx(1.0));
    }
    for (const auto& [name, delta] : cmp.deltas) CHECK(delta == 0.0);
}

TEST_CASE("compare rejects mismatched runs") {
    std::mt19937_64 rng(0x3e93);
    ExperimentReport a = sample_report(1, rng), b = sample_report(2, rng);
    CHECK_THROWS_AS(compare(a, b), std::invalid_argument);
    b = sample_report(1, rng);
    b.workload_kind = "rand_read";
    CHECK_THROWS_AS(compare(a, b), std::invalid_argument);
}

TEST_CASE("compare computes read-amplification style ratios") {
    std::mt19937_64 rng(0x3e94);
    ExperimentReport off = sample_report(3, rng);
    off.mode = "off";
    off.counters.nvm_data_reads = 1000;
    off.counters.nvm_redundancy_reads = 0;
    ExperimentReport ev = off;
    ev.mode = "ev";
    ev.counters.nvm_redundancy_reads = 1000;  // one checksum line per data line
    CHECK(compare(ev, off).ratios.at("nvm_reads") == doctest::Approx(2.0));
    ExperimentReport naive = off;
    naive.mode = "naive";
    naive.counters.nvm_redundancy_reads = 64000;
    CHECK(compare(naive, off).ratios.at("nvm_reads") == doctest::Approx(65.0));
}

TEST_CASE("summary reports mean and rms error across seeds") {
    std::mt19937_64 rng(0x3e95);
    std::vector<ExperimentReport> rs;
    for (uint64_t s : {1, 2, 3}) {
        ExperimentReport r = sample_report(s, rng);
        r.counters.nvm_data_reads = 100 * s;  // 100, 200, 300
        rs.push_back(r);
    }
    Json j = summarize(rs);
    CHECK(j["metrics"]["nvm_data_reads"]["mean"].get<double>() == doctest::Approx(200.0));
    // Population rms of {100,200,300} about the mean.
    CHECK(j["metrics"]["nvm_data_reads"]["rms_error"].get<double>() ==
          doctest::Approx(std::sqrt(20000.0 / 3.0)));
}
