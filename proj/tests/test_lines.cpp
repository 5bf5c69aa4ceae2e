#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "nvred/lines.hpp"
#include "oracles.hpp"

using namespace nvred;
using namespace nvred::test;

TEST_CASE("line_diff basics") {
    std::mt19937_64 rng(0x11ed0001);
    CacheLine a = random_line(rng);
    CHECK(is_zero(line_diff(a, a)));
    CHECK(line_diff(zero_line(), a) == a);
    for (int i = 0; i < 200; ++i) {
        CacheLine x = random_line(rng), y = random_line(rng);
        // diff(x,y) ^ y == x
        CacheLine d = line_diff(x, y);
        xor_into(d, y);
        CHECK(d == x);
    }
}

TEST_CASE("parity_update with zero diff is identity") {
    std::mt19937_64 rng(0x11ed0002);
    CacheLine p = random_line(rng);
    CHECK(parity_update(p, zero_line()) == p);
}

TEST_CASE("parity over a fresh zero stripe equals the written line") {
    std::mt19937_64 rng(0x11ed0003);
    CacheLine v = random_line(rng);
    CacheLine parity = zero_line();
    parity = parity_update(parity, line_diff(zero_line(), v));
    CHECK(parity == v);
}

TEST_CASE("parity closure after k random line updates") {
    std::mt19937_64 rng(0x11ed0004);
    const int members = 3;
    std::vector<CacheLine> data(members, zero_line());
    CacheLine parity = zero_line();
    for (int step = 0; step < 500; ++step) {
        int m = rng() % members;
        CacheLine next = random_line(rng);
        parity = parity_update(parity, line_diff(data[m], next));
        data[m] = next;
        // Recompute-from-scratch oracle.
        CacheLine expect = zero_line();
        for (const auto& d : data) xor_into(expect, d);
        CHECK(parity == expect);
    }
}

TEST_CASE("reconstruct_line recovers the dropped member") {
    std::mt19937_64 rng(0x11ed0005);
    // Spec example: three survivors {a, b, a^b^m} yield m.
    CacheLine a = random_line(rng), b = random_line(rng), m = random_line(rng);
    CacheLine par = a;
    xor_into(par, b);
    xor_into(par, m);
    std::vector<CacheLine> survivors{a, b, par};
    CHECK(reconstruct_line(survivors, 3) == m);

    // All-zero survivors give a zero line.
    std::vector<CacheLine> zeros(3, zero_line());
    CHECK(is_zero(reconstruct_line(zeros, 3)));

    // Random stripes, dropping each member in turn.
    for (int trial = 0; trial < 100; ++trial) {
        const int width = 4;
        std::vector<CacheLine> stripe(width);
        for (auto& l : stripe) l = random_line(rng);
        // Make the last member the XOR parity of the others.
        stripe[width - 1] = zero_line();
        for (int i = 0; i < width - 1; ++i) xor_into(stripe[width - 1], stripe[i]);
        for (int drop = 0; drop < width; ++drop) {
            std::vector<CacheLine> rest;
            for (int i = 0; i < width; ++i)
                if (i != drop) rest.push_back(stripe[i]);
            CHECK(reconstruct_line(rest, width - 1) == stripe[drop]);
        }
    }
}

TEST_CASE("reconstruct_line rejects malformed stripes") {
    std::vector<CacheLine> two(2, zero_line());
    CHECK_THROWS_AS(reconstruct_line(two, 3), std::invalid_argument);
}
