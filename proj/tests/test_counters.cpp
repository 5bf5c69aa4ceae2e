#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nvred/counters.hpp"

using namespace nvred;

TEST_CASE("empty counters accrue to zero") {
    AccessCounters c(4);
    auto a = accrue(c, EnergyTimingModel::defaults());
    CHECK(a.energy_joules == 0.0);
    CHECK(a.model_runtime_ns == 0.0);
}

TEST_CASE("single NVM data read") {
    AccessCounters c(2);
    c.record(0, SimEvent::NvmDataRead);
    auto a = accrue(c, EnergyTimingModel::defaults());
    CHECK(a.energy_joules == doctest::Approx(1.6e-9).epsilon(1e-12));
    CHECK(a.model_runtime_ns == doctest::Approx(60.0));
}

TEST_CASE("mixed synthetic counter set matches hand-computed totals") {
    // Hand-summed with the table constants:
    //   thread 0: 10 L1 hits, 3 L1 misses, 3 L2 hits -> 10*4c + 3*7c
    //   thread 1: 2 LLC hits, 1 NVM data read, 1 NVM redundancy write
    //             -> 2*27c + 60ns + 150ns
    // energy = 10*15 + 3*33 + 3*46 + 2*240 + 500*0 ... pJ + 1.6nJ + 9nJ
    AccessCounters c(2);
    c.record(0, SimEvent::L1Hit, 10);
    c.record(0, SimEvent::L1Miss, 3);
    c.record(0, SimEvent::L2Hit, 3);
    c.record(1, SimEvent::LlcHit, 2);
    c.record(1, SimEvent::NvmDataRead, 1);
    c.record(1, SimEvent::NvmRedundancyWrite, 1);

    const double cyc = 1.0 / 2.27;
    double t0 = 10 * 4 * cyc + 3 * 7 * cyc;
    double t1 = 2 * 27 * cyc + 60 + 150;
    double pj = 10 * 15 + 3 * 33 + 3 * 46 + 2 * 240 + 1600 + 9000;

    auto a = accrue(c, EnergyTimingModel::defaults());
    CHECK(a.model_runtime_ns == doctest::Approx(std::max(t0, t1)));
    CHECK(a.energy_joules == doctest::Approx(pj * 1e-12));
}

TEST_CASE("energy is a linear functional of the counters") {
    std::mt19937_64 rng(0xacc0);
    AccessCounters c(3), doubled(3);
    for (int i = 0; i < 100; ++i) {
        uint32_t t = rng() % 3;
        SimEvent e = SimEvent(rng() % kSimEventCount);
        uint64_t n = rng() % 50;
        c.record(t, e, n);
        doubled.record(t, e, 2 * n);
    }
    auto m = EnergyTimingModel::defaults();
    CHECK(accrue(doubled, m).energy_joules == doctest::Approx(2 * accrue(c, m).energy_joules));
}

TEST_CASE("counters sum and compare") {
    AccessCounters a(2), b(2);
    a.record(0, SimEvent::L1Hit, 5);
    b.record(0, SimEvent::L1Hit, 7);
    b.record(1, SimEvent::NvmDataWrite, 2);
    AccessCounters sum = a;
    sum += b;
    CHECK(sum.l1_hits() == 12);
    CHECK(sum.nvm_data_writes() == 2);
    CHECK(sum.of_thread(1, SimEvent::NvmDataWrite) == 2);
    CHECK_FALSE(a == b);
}
