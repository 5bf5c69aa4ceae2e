#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "nvred/cache.hpp"
#include "oracles.hpp"

using namespace nvred;
using namespace nvred::test;

namespace {

CacheLevelConfig tiny(uint32_t assoc, uint64_t sets) {
    CacheLevelConfig c;
    c.capacity = sets * assoc * kLineSize;
    c.associativity = assoc;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    CacheLevelConfig c = tiny(8, 64);
    c.validate();
    CHECK(c.sets() == 64);
    c.capacity += 1;
    CHECK_THROWS(c.validate());
    WayPartitionPlan p{8, 0};
    CHECK_THROWS(p.validate(8));  // no data ways left
    WayPartitionPlan ok{2, 1};
    ok.validate(16);
    CHECK(ok.data_ways(16) == 13);
}

TEST_CASE("repeated access: first miss, then hits") {
    SetAssocCache c(tiny(4, 16));
    uint64_t a = 0x1000;
    CHECK_FALSE(c.access(a, Partition::Data));
    c.install(a, zero_line(), false, Partition::Data);
    for (int i = 0; i < 5; ++i) CHECK(c.access(a, Partition::Data));
}

TEST_CASE("LRU evicts the least recently used way") {
    const uint32_t k = 4;
    SetAssocCache c(tiny(k, 16));
    // k+1 distinct lines mapping to set 0 (stride = sets * line).
    uint64_t stride = 16 * kLineSize;
    for (uint64_t i = 0; i <= k; ++i) {
        CHECK_FALSE(c.access(i * stride, Partition::Data));
        auto v = c.install(i * stride, zero_line(), false, Partition::Data);
        if (i < k) CHECK_FALSE(v.has_value());
        else {
            REQUIRE(v.has_value());
            CHECK(v->addr == 0);  // the first line was LRU
        }
    }
    CHECK_FALSE(c.access(0, Partition::Data));     // evicted
    CHECK(c.access(1 * stride, Partition::Data));  // still resident
}

TEST_CASE("partition isolation: redundancy fills never evict data lines") {
    CacheLevelConfig cfg = tiny(8, 8);
    SetAssocCache c(cfg, WayPartitionPlan{2, 2});
    uint64_t stride = 8 * kLineSize;
    // Fill the data partition of set 0.
    std::set<uint64_t> data_lines;
    for (uint64_t i = 0; i < 4; ++i) {
        c.install((100 + i) * stride, zero_line(), false, Partition::Data);
        data_lines.insert((100 + i) * stride);
    }
    // Sweep many redundancy lines through the same set.
    for (uint64_t i = 0; i < 64; ++i) {
        auto v = c.install((200 + i) * stride, zero_line(), false, Partition::Redundancy);
        if (v) CHECK(data_lines.count(v->addr) == 0);
    }
    for (uint64_t a : data_lines) CHECK(c.access(a, Partition::Data));
    // And data lookups never see redundancy-partition residents.
    c.install(300 * stride, zero_line(), false, Partition::Redundancy);
    CHECK_FALSE(c.access(300 * stride, Partition::Data));
    CHECK(c.access(300 * stride, Partition::Redundancy));
}

TEST_CASE("cold ways fill lowest index first; victims report dirty content") {
    SetAssocCache c(tiny(2, 4));
    std::mt19937_64 rng(0xcace);
    CacheLine v1 = random_line(rng), v2 = random_line(rng), v3 = random_line(rng);
    uint64_t stride = 4 * kLineSize;
    c.install(0 * stride, v1, true, Partition::Data);
    c.install(1 * stride, v2, false, Partition::Data);
    auto victim = c.install(2 * stride, v3, false, Partition::Data);
    REQUIRE(victim.has_value());
    CHECK(victim->addr == 0);
    CHECK(victim->dirty);
    CHECK(victim->content == v1);
}

TEST_CASE("content and dirty state round-trip") {
    SetAssocCache c(tiny(4, 4));
    std::mt19937_64 rng(0xcace2);
    CacheLine v = random_line(rng);
    c.install(0x40, zero_line(), false, Partition::Data);
    CHECK_FALSE(c.dirty(0x40));
    c.write(0x40, v, true);
    CHECK(c.dirty(0x40));
    CHECK(c.read(0x40) == v);
    c.mark_clean(0x40);
    CHECK_FALSE(c.dirty(0x40));
    c.invalidate(0x40);
    CHECK_FALSE(c.contains(0x40));
}

TEST_CASE("for_each_line reports partitions") {
    CacheLevelConfig cfg = tiny(4, 4);
    SetAssocCache c(cfg, WayPartitionPlan{1, 1});
    c.install(0x00, zero_line(), false, Partition::Data);
    c.install(0x40, zero_line(), true, Partition::Redundancy);
    int data = 0, red = 0;
    c.for_each_line([&](uint64_t, const CacheLine&, bool dirty, Partition p) {
        if (p == Partition::Data) ++data;
        if (p == Partition::Redundancy) {
            ++red;
            CHECK(dirty);
        }
    });
    CHECK(data == 1);
    CHECK(red == 1);
    CHECK(c.partition_of(0x40) == Partition::Redundancy);
}
