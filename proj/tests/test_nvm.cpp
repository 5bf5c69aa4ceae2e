#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <unordered_map>

#include "nvred/crc32c.hpp"
#include "nvred/nvm.hpp"
#include "oracles.hpp"

using namespace nvred;
using namespace nvred::test;

namespace {

struct Rig {
    RedundancyLayout layout{4, 1 << 20};
    AccessCounters counters{2};
    NvmConfig cfg{4, 1 << 20, 60, 150, 1.6, 9};
    NvmDevice dev{layout, cfg, &counters};

    Rig() { dev.enable_op_tracking(); }  // schedules arm mid-test
};

}  // namespace

TEST_CASE("config validation") {
    NvmConfig bad;
    bad.read_latency_ns = 0;
    CHECK_THROWS(bad.validate());
    NvmConfig ok;
    ok.validate();
}

TEST_CASE("reads return the last written value with an empty schedule") {
    Rig r;
    std::mt19937_64 rng(0x4e40);
    uint64_t base = r.layout.data_page_addr(0);
    std::unordered_map<uint64_t, CacheLine> shadow;
    for (int i = 0; i < 2000; ++i) {
        uint64_t addr = base + (rng() % 64) * kLineSize;
        if (rng() & 1) {
            CacheLine v = random_line(rng);
            r.dev.write_line(addr, v, NvmClass::Data, 0);
            shadow[addr] = v;
        } else {
            auto got = r.dev.read_line(addr, NvmClass::Data, 0);
            CHECK_FALSE(got.misdirected);
            CacheLine want = shadow.count(addr) ? shadow[addr] : zero_line();
            CHECK(got.data == want);
        }
    }
    CHECK(r.dev.fired_faults().empty());
}

TEST_CASE("counters accrue by class and thread") {
    Rig r;
    uint64_t a = r.layout.data_page_addr(0);
    r.dev.read_line(a, NvmClass::Data, 0);
    r.dev.read_line(a, NvmClass::Redundancy, 1);
    r.dev.write_line(a, zero_line(), NvmClass::Data, 1);
    CHECK(r.counters.nvm_data_reads() == 1);
    CHECK(r.counters.nvm_redundancy_reads() == 1);
    CHECK(r.counters.nvm_data_writes() == 1);
    CHECK(r.counters.of_thread(1, SimEvent::NvmDataWrite) == 1);
}

TEST_CASE("unmapped address errors") {
    Rig r;
    CHECK_THROWS(r.dev.read_line(r.layout.total_bytes(), NvmClass::Data, 0));
    CHECK_THROWS(r.dev.read_line(3, NvmClass::Data, 0));  // unaligned
}

TEST_CASE("lost write: acknowledged but media keeps the old value") {
    Rig r;
    uint64_t a = r.layout.data_page_addr(0);
    std::mt19937_64 rng(0x4e41);
    CacheLine v1 = random_line(rng), v2 = random_line(rng);
    r.dev.write_line(a, v1, NvmClass::Data, 0);
    r.dev.arm({{FaultKind::LostWrite, a, 2, 0, true}});
    r.dev.write_line(a, v2, NvmClass::Data, 0);  // second write to a: fires
    CHECK(r.dev.read_line(a, NvmClass::Data, 0).data == v1);
    CHECK(r.dev.fired_faults().size() == 1);
    CHECK(r.dev.line_is_corrupted(a));
    // A later successful write clears the staleness.
    r.dev.write_line(a, v2, NvmClass::Data, 0);
    CHECK_FALSE(r.dev.line_is_corrupted(a));
}

TEST_CASE("misdirected write corrupts the target and stales the source") {
    Rig r;
    uint64_t a = r.layout.data_page_addr(0);
    uint64_t b = r.layout.data_page_addr(1);
    std::mt19937_64 rng(0x4e42);
    CacheLine va = random_line(rng), vb = random_line(rng), vnew = random_line(rng);
    r.dev.write_line(a, va, NvmClass::Data, 0);
    r.dev.write_line(b, vb, NvmClass::Data, 0);
    r.dev.arm({{FaultKind::MisdirectedWrite, a, 2, b, true}});
    r.dev.write_line(a, vnew, NvmClass::Data, 0);
    CHECK(r.dev.read_line(a, NvmClass::Data, 0).data == va);   // source stale
    CHECK(r.dev.read_line(b, NvmClass::Data, 0).data == vnew); // target corrupted
    CHECK(r.dev.line_is_corrupted(a));
    CHECK(r.dev.line_is_corrupted(b));
}

TEST_CASE("misdirected read fires once and returns the foreign line") {
    Rig r;
    uint64_t a = r.layout.data_page_addr(0);
    uint64_t b = r.layout.data_page_addr(1);
    std::mt19937_64 rng(0x4e43);
    CacheLine va = random_line(rng), vb = random_line(rng);
    r.dev.write_line(a, va, NvmClass::Data, 0);
    r.dev.write_line(b, vb, NvmClass::Data, 0);
    r.dev.arm({{FaultKind::MisdirectedRead, a, 1, b, true}});
    auto first = r.dev.read_line(a, NvmClass::Data, 0);
    CHECK(first.misdirected);
    CHECK(first.data == vb);
    auto second = r.dev.read_line(a, NvmClass::Data, 0);
    CHECK_FALSE(second.misdirected);
    CHECK(second.data == va);
}

TEST_CASE("fault entries validate") {
    FaultScheduleEntry e{FaultKind::MisdirectedWrite, 0x40, 1, 0x40, true};
    CHECK_THROWS(e.validate());
    FaultScheduleEntry zero_ord{FaultKind::LostWrite, 0x40, 0, 0, true};
    CHECK_THROWS(zero_ord.validate());
}

TEST_CASE("untouched checksum regions read as formatted") {
    Rig r;
    // System-checksum entry of an untouched data page equals the checksum
    // of a zeroed page.
    std::vector<uint8_t> zero_page(4096, 0);
    uint64_t entry = r.layout.system_checksum_addr(r.layout.data_page_addr(7));
    CHECK(r.dev.peek_u32(entry) == crc32c(zero_page));
    // Parity pages of untouched stripes are zero.
    auto ploc = r.layout.parity_addr(r.layout.data_page_addr(7));
    CHECK(is_zero(r.dev.peek_line(ploc.page_addr)));
    // Object-checksum entries default to the zero-line checksum.
    uint64_t oentry = r.layout.object_checksum_addr(r.layout.data_page_addr(7), 0, 64);
    CHECK(r.dev.peek_u32(oentry) == crc32c(std::vector<uint8_t>(64, 0)));
}

TEST_CASE("peek/poke round-trip without counting") {
    Rig r;
    uint64_t a = r.layout.data_page_addr(3);
    std::mt19937_64 rng(0x4e44);
    CacheLine v = random_line(rng);
    r.dev.poke_line(a, v);
    CHECK(r.dev.peek_line(a) == v);
    r.dev.poke_u32(a + 8, 0xdeadbeef);
    CHECK(r.dev.peek_u32(a + 8) == 0xdeadbeef);
    CHECK(r.counters.nvm_reads() == 0);
    CHECK(r.counters.nvm_writes() == 0);
}
