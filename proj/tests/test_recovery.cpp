#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "nvred/audit.hpp"
#include "nvred/machine.hpp"
#include "oracles.hpp"

using namespace nvred;
using namespace nvred::test;

namespace {

MachineConfig tiny_machine(ControllerMode mode) {
    MachineConfig c = MachineConfig::defaults();
    c.l1 = {1024, 2, 4, 15, 33, kLineSize, false};
    c.l2 = {2048, 2, 7, 46, 94, kLineSize, false};
    c.llc = {8192, 4, 27, 240, 500, kLineSize, true};
    c.llc_plan = {1, 1};
    c.nvm.dimm_capacity = 1 << 20;
    c.threads = 2;
    c.controller.mode = mode;
    return c;
}

}  // namespace

// Lost-write timeline: a successful write, then a lost one, then a read.
TEST_CASE("fig1a: without checksums the stale value is consumed silently") {
    std::mt19937_64 rng(0xfe10);
    MachineConfig cfg = tiny_machine(ControllerMode::Off);
    RedundancyLayout probe(cfg.nvm.num_dimms, cfg.nvm.dimm_capacity);
    uint64_t addr = probe.data_page_addr(0) + 6 * kLineSize;
    CacheLine v1 = random_line(rng), v2 = random_line(rng);
    Machine m(cfg, {{FaultKind::LostWrite, addr, 2, 0, true}});
    m.map_file(0, 12);
    m.access(0, true, addr, v1);
    m.drain();  // first media write succeeds
    m.access(0, true, addr, v2);
    m.drain();  // second write is lost
    CHECK(m.device().peek_line(addr) == v1);
    m.access(0, false, addr);
    CHECK(m.value_of(addr) == v1);  // stale data consumed
    CHECK(m.controller().detections().empty());
}

TEST_CASE("fig1b: checksums detect the lost write; parity recovers the new value") {
    for (ControllerMode mode : {ControllerMode::Naive, ControllerMode::EV, ControllerMode::EVU}) {
        std::mt19937_64 rng(0xfe11);
        MachineConfig cfg = tiny_machine(mode);
        RedundancyLayout probe(cfg.nvm.num_dimms, cfg.nvm.dimm_capacity);
        uint64_t addr = probe.data_page_addr(0) + 6 * kLineSize;
        Machine m(cfg, {{FaultKind::LostWrite, addr, 2, 0, true}});
        m.map_file(0, 12);
        CacheLine v1 = random_line(rng), v2 = random_line(rng);
        m.access(0, true, addr, v1);
        m.drain();
        m.access(0, true, addr, v2);
        m.drain();  // data write lost; checksum and parity writes landed
        CHECK(m.device().peek_line(addr) == v1);
        m.access(0, false, addr);
        INFO(to_string(mode));
        REQUIRE(m.controller().detections().size() == 1);
        CHECK(m.controller().detections()[0].recovered);
        // Recovery restored the acknowledged (new) value.
        CHECK(m.device().peek_line(addr) == v2);
        CHECK(m.value_of(addr) == v2);
        m.drain();
        CHECK(audit_redundancy(m).ok);
    }
}

// Misdirected-write timeline: a write intended for one line lands on another.
TEST_CASE("fig2a: without checksums both corruptions are consumed silently") {
    std::mt19937_64 rng(0xfe12);
    MachineConfig cfg = tiny_machine(ControllerMode::Off);
    RedundancyLayout probe(cfg.nvm.num_dimms, cfg.nvm.dimm_capacity);
    uint64_t a = probe.data_page_addr(0) + 3 * kLineSize;   // intended target
    uint64_t b = probe.data_page_addr(9) + 11 * kLineSize;  // actually written
    Machine m(cfg, {{FaultKind::MisdirectedWrite, a, 2, b, true}});
    m.map_file(0, 12);
    CacheLine va1 = random_line(rng), vb = random_line(rng), va2 = random_line(rng);
    m.access(0, true, a, va1);
    m.access(0, true, b, vb);
    m.drain();
    m.access(0, true, a, va2);
    m.drain();  // misdirected: lands on b
    CHECK(m.device().peek_line(a) == va1);  // stale
    CHECK(m.device().peek_line(b) == va2);  // corrupted
    m.access(0, false, b);
    CHECK(m.value_of(b) == va2);  // corrupt data consumed
    m.access(0, false, a);
    CHECK(m.value_of(a) == va1);  // stale data consumed
    CHECK(m.controller().detections().empty());
}

TEST_CASE("fig2b: both sides detected; recovery restores both pages") {
    for (ControllerMode mode : {ControllerMode::Naive, ControllerMode::EV, ControllerMode::EVU}) {
        std::mt19937_64 rng(0xfe13);
        MachineConfig cfg = tiny_machine(mode);
        RedundancyLayout probe(cfg.nvm.num_dimms, cfg.nvm.dimm_capacity);
        uint64_t a = probe.data_page_addr(0) + 3 * kLineSize;
        uint64_t b = probe.data_page_addr(9) + 11 * kLineSize;  // different stripe
        Machine m(cfg, {{FaultKind::MisdirectedWrite, a, 2, b, true}});
        m.map_file(0, 12);
        CacheLine va1 = random_line(rng), vb = random_line(rng), va2 = random_line(rng);
        m.access(0, true, a, va1);
        m.access(0, true, b, vb);
        m.drain();
        m.access(0, true, a, va2);
        m.drain();

        INFO(to_string(mode));
        // Reading the corrupted victim detects and restores its old content.
        m.access(0, false, b);
        REQUIRE(m.controller().detections().size() == 1);
        CHECK(m.controller().detections()[0].recovered);
        CHECK(m.device().peek_line(b) == vb);
        CHECK(m.value_of(b) == vb);
        // Reading the stale source detects and restores the acknowledged value.
        m.access(0, false, a);
        REQUIRE(m.controller().detections().size() == 2);
        CHECK(m.controller().detections()[1].recovered);
        CHECK(m.device().peek_line(a) == va2);
        CHECK(m.value_of(a) == va2);
        m.drain();
        CHECK(audit_redundancy(m).ok);
    }
}

TEST_CASE("misdirected read is detected and the retry returns correct data") {
    std::mt19937_64 rng(0xfe14);
    MachineConfig cfg = tiny_machine(ControllerMode::EVU);
    RedundancyLayout probe(cfg.nvm.num_dimms, cfg.nvm.dimm_capacity);
    uint64_t a = probe.data_page_addr(2) + 5 * kLineSize;
    uint64_t b = probe.data_page_addr(7) + 5 * kLineSize;
    Machine m(cfg);
    m.device().enable_op_tracking();
    m.map_file(0, 12);
    CacheLine va = random_line(rng), vb = random_line(rng);
    m.access(0, true, a, va);
    m.access(0, true, b, vb);
    m.drain();
    // Arm the fault on the next media read of the line (the read-back fill).
    m.device().arm(
        {{FaultKind::MisdirectedRead, a, m.device().reads_at(a) + 1, b, true}});
    m.access(0, false, a);
    REQUIRE(m.device().fired_faults().size() == 1);
    REQUIRE(m.controller().detections().size() == 1);
    CHECK(m.controller().detections()[0].recovered);
    CHECK(m.value_of(a) == va);  // retry after recovery returned the real data
    CHECK(m.controller().missed_detections() == 0);
}

TEST_CASE("two corrupted members of one stripe are unrecoverable") {
    std::mt19937_64 rng(0xfe15);
    MachineConfig cfg = tiny_machine(ControllerMode::EV);
    RedundancyLayout probe(cfg.nvm.num_dimms, cfg.nvm.dimm_capacity);
    // Logical pages 0 and 1 share stripe 0 on different DIMMs.
    uint64_t a = probe.data_page_addr(0) + 2 * kLineSize;
    uint64_t b = probe.data_page_addr(1) + 7 * kLineSize;
    Machine m(cfg, {{FaultKind::LostWrite, a, 2, 0, true},
                    {FaultKind::LostWrite, b, 2, 0, true}});
    m.map_file(0, 12);
    CacheLine va = random_line(rng), vb = random_line(rng);
    m.access(0, true, a, va);
    m.access(0, true, b, vb);
    m.drain();
    m.access(0, true, a, random_line(rng));
    m.access(0, true, b, random_line(rng));
    m.drain();  // both second writes lost
    m.access(0, false, a);
    REQUIRE(m.controller().detections().size() == 1);
    CHECK_FALSE(m.controller().detections()[0].recovered);
    CHECK(m.controller().recoveries_failed() == 1);
}

TEST_CASE("randomized fault schedules: every fired fault is detected on read-back") {
    std::mt19937_64 rng(0xfe16);
    for (ControllerMode mode : {ControllerMode::Naive, ControllerMode::EV, ControllerMode::EVU}) {
        MachineConfig cfg = tiny_machine(mode);
        RedundancyLayout probe(cfg.nvm.num_dimms, cfg.nvm.dimm_capacity);
        const uint64_t pages = 48, lines = pages * 64;  // 16 stripe rows
        // One fault per mapped stripe at most, so recovery always has clean
        // survivors. Misdirect targets live on spare unmapped pages.
        std::vector<FaultScheduleEntry> faults;
        std::set<uint64_t> used_rows;
        std::vector<uint64_t> spares;
        while (faults.size() < 12) {
            uint64_t l = rng() % lines;
            uint64_t page_addr = probe.data_page_addr(l / 64);
            uint64_t row = probe.row_of(page_addr);
            if (!used_rows.insert(row).second) continue;
            uint64_t addr = page_addr + (l % 64) * kLineSize;
            int kind = rng() % 3;
            if (kind == 0) {
                faults.push_back({FaultKind::LostWrite, addr, 1, 0, true});
            } else {
                uint64_t spare = probe.data_page_addr(pages + (faults.size() % 4)) +
                                 (rng() % 64) * kLineSize;
                spares.push_back(spare);
                faults.push_back({kind == 1 ? FaultKind::MisdirectedWrite
                                            : FaultKind::MisdirectedRead,
                                  addr, 1, spare, true});
            }
        }
        Machine m(cfg);
        m.device().enable_op_tracking();
        // Distinct content on the spare lines so a misdirected read never
        // happens to return bytes with a matching checksum.
        for (uint64_t spare : spares) m.device().poke_line(spare, random_line(rng));
        m.map_file(0, pages);
        // Arm after mapping, relative to the per-line operation counts the
        // setup phase already consumed.
        for (auto& f : faults)
            f.occurrence += f.kind == FaultKind::MisdirectedRead
                                ? m.device().reads_at(f.target_line)
                                : m.device().writes_at(f.target_line);
        m.device().arm(faults);
        // Write every line once, drain (write faults fire), then read back.
        for (uint64_t l = 0; l < lines; ++l)
            m.access(0, true, probe.data_page_addr(l / 64) + (l % 64) * kLineSize,
                     random_line(rng));
        m.drain();
        for (uint64_t l = 0; l < lines; ++l)
            m.access(0, false, probe.data_page_addr(l / 64) + (l % 64) * kLineSize);

        INFO(to_string(mode));
        size_t fired = m.device().fired_faults().size();
        CHECK(fired == 12);
        CHECK(m.controller().detected_fault_indices().size() == fired);
        CHECK(m.controller().missed_detections() == 0);
    }
}
