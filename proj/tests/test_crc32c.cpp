#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "nvred/crc32c.hpp"
#include "oracles.hpp"

using namespace nvred;
using namespace nvred::test;

namespace {

std::span<const uint8_t> as_bytes(const char* s) {
    return {reinterpret_cast<const uint8_t*>(s), std::strlen(s)};
}

}  // namespace

TEST_CASE("crc32c known values") {
    CHECK(crc32c({}) == 0x00000000u);
    // Standard check value for the Castagnoli polynomial.
    CHECK(crc32c(as_bytes("123456789")) == 0xE3069283u);
    // Frozen from the bitwise reference.
    std::vector<uint8_t> zeros(4096, 0);
    CHECK(crc32c(zeros) == 0x98F94189u);
    CHECK(crc32c(zeros) == crc32c_bitwise(zeros));
}

TEST_CASE("crc32c matches bitwise reference on random inputs") {
    std::mt19937_64 rng(0x5eed0001);
    for (int i = 0; i < 200; ++i) {
        size_t len = rng() % 300;
        auto data = random_bytes(rng, len);
        CHECK(crc32c(data) == crc32c_bitwise(data));
        CHECK(crc_raw(data) == crc_raw_bitwise(data));
    }
}

TEST_CASE("crc_raw of all-zero input is zero") {
    for (size_t len : {0, 1, 7, 64, 4096}) {
        std::vector<uint8_t> zeros(len, 0);
        CHECK(crc_raw(zeros) == 0u);
    }
}

TEST_CASE("crc_raw single byte 0x01") {
    // Frozen from the bitwise reference.
    uint8_t b = 0x01;
    CHECK(crc_raw({&b, 1}) == 0xF26B8303u);
}

TEST_CASE("crc_raw linearity over XOR") {
    std::mt19937_64 rng(0x5eed0002);
    for (int i = 0; i < 1000; ++i) {
        auto a = random_bytes(rng, 64);
        auto b = random_bytes(rng, 64);
        std::vector<uint8_t> x(64);
        for (int j = 0; j < 64; ++j) x[j] = a[j] ^ b[j];
        CHECK(crc_raw(x) == (crc_raw(a) ^ crc_raw(b)));
        CHECK(crc_raw(x) == crc_raw_bitwise(x));
    }
}

TEST_CASE("crc_shift identity and zero") {
    std::mt19937_64 rng(0x5eed0003);
    for (int i = 0; i < 20; ++i) {
        uint32_t c = uint32_t(rng());
        CHECK(crc_shift(c, 0) == c);
    }
    for (uint64_t n : {0, 1, 5, 64, 4032, 1 << 20}) CHECK(crc_shift(0, n) == 0u);
}

TEST_CASE("crc_shift equals literal zero-append") {
    std::mt19937_64 rng(0x5eed0004);
    for (int i = 0; i < 100; ++i) {
        auto d = random_bytes(rng, 64);
        uint64_t zeros = rng() % 5000;
        CHECK(crc_shift(crc_raw(d), zeros) == crc_raw_with_zeros(d, zeros));
    }
    // The specific distance used by stride-1 page updates.
    auto d = random_bytes(rng, 64);
    CHECK(crc_shift(crc_raw(d), 4032) == crc_raw_with_zeros(d, 4032));
}

TEST_CASE("incremental page checksum: zero diff is identity") {
    std::mt19937_64 rng(0x5eed0005);
    auto page = random_bytes(rng, 4096);
    uint32_t old = crc32c(page);
    std::vector<uint8_t> zero(64, 0);
    CHECK(incremental_page_checksum(old, zero, 1024, 4096) == old);
}

TEST_CASE("incremental page checksum equals full recompute") {
    std::mt19937_64 rng(0x5eed0006);
    auto page = random_bytes(rng, 4096);
    uint32_t crc = crc32c(page);
    // Single mutation at offset 1024 checked explicitly.
    {
        auto diff = random_bytes(rng, 64);
        auto page2 = page;
        for (int i = 0; i < 64; ++i) page2[1024 + i] ^= diff[i];
        CHECK(incremental_page_checksum(crc, diff, 1024, 4096) == crc32c(page2));
    }
    // Chained random mutations.
    for (int i = 0; i < 2000; ++i) {
        size_t offset = (rng() % 64) * 64;
        auto diff = random_bytes(rng, 64);
        for (int j = 0; j < 64; ++j) page[offset + j] ^= diff[j];
        crc = incremental_page_checksum(crc, diff, offset, 4096);
        if (i % 100 == 0) CHECK(crc == crc32c(page));
    }
    CHECK(crc == crc32c(page));
}

TEST_CASE("incremental page checksum: same diff twice restores the old value") {
    std::mt19937_64 rng(0x5eed0007);
    auto page = random_bytes(rng, 4096);
    uint32_t old = crc32c(page);
    auto diff = random_bytes(rng, 64);
    uint32_t once = incremental_page_checksum(old, diff, 512, 4096);
    CHECK(incremental_page_checksum(once, diff, 512, 4096) == old);
}
