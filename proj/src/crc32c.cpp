#include "nvred/crc32c.hpp"

#include <array>
#include <stdexcept>

namespace nvred {
namespace {

// Slicing-by-8 tables. table[0] is the plain byte-at-a-time table; table[k]
// extends a byte processed k positions earlier.
struct Tables {
    uint32_t t[8][256];

    constexpr Tables() : t{} {
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int j = 0; j < 8; ++j)
                c = (c >> 1) ^ ((c & 1) ? kCrc32cPolyReflected : 0);
            t[0][i] = c;
        }
        for (uint32_t i = 0; i < 256; ++i)
            for (int k = 1; k < 8; ++k)
                t[k][i] = (t[k - 1][i] >> 8) ^ t[0][t[k - 1][i] & 0xFF];
    }
};

constexpr Tables kTables{};

uint32_t update(uint32_t crc, std::span<const uint8_t> data) {
    const uint8_t* p = data.data();
    size_t n = data.size();
    while (n >= 8) {
        uint32_t lo = crc ^ (uint32_t(p[0]) | uint32_t(p[1]) << 8 |
                             uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24);
        crc = kTables.t[7][lo & 0xFF] ^ kTables.t[6][(lo >> 8) & 0xFF] ^
              kTables.t[5][(lo >> 16) & 0xFF] ^ kTables.t[4][lo >> 24] ^
              kTables.t[3][p[4]] ^ kTables.t[2][p[5]] ^
              kTables.t[1][p[6]] ^ kTables.t[0][p[7]];
        p += 8;
        n -= 8;
    }
    while (n--) crc = (crc >> 8) ^ kTables.t[0][(crc ^ *p++) & 0xFF];
    return crc;
}

// GF(2) matrix operating on the 32-bit reflected CRC state; mat[i] is the
// image of bit i.
using Gf2Matrix = std::array<uint32_t, 32>;

uint32_t gf2_times(const Gf2Matrix& m, uint32_t vec) {
    uint32_t sum = 0;
    for (int i = 0; vec; ++i, vec >>= 1)
        if (vec & 1) sum ^= m[i];
    return sum;
}

Gf2Matrix gf2_square(const Gf2Matrix& m) {
    Gf2Matrix sq;
    for (int i = 0; i < 32; ++i) sq[i] = gf2_times(m, m[i]);
    return sq;
}

// Matrix that advances the CRC state over one zero bit.
Gf2Matrix zero_bit_matrix() {
    Gf2Matrix m;
    m[0] = kCrc32cPolyReflected;
    for (int i = 1; i < 32; ++i) m[i] = 1u << (i - 1);
    return m;
}

}  // namespace

Checksum32 crc32c(std::span<const uint8_t> data) {
    return update(0xFFFFFFFFu, data) ^ 0xFFFFFFFFu;
}

Checksum32 crc_raw(std::span<const uint8_t> data) {
    return update(0, data);
}

Checksum32 crc_shift(Checksum32 c, uint64_t zero_bytes) {
    uint64_t bits = zero_bytes * 8;
    Gf2Matrix m = zero_bit_matrix();
    while (bits) {
        if (bits & 1) c = gf2_times(m, c);
        m = gf2_square(m);
        bits >>= 1;
    }
    return c;
}


CrcShiftOp::CrcShiftOp(uint64_t zero_bytes) {
    // Identity, then fold in squarings of the zero-bit matrix per set bit.
    Gf2Matrix acc;
    for (int i = 0; i < 32; ++i) acc[i] = 1u << i;
    uint64_t bits = zero_bytes * 8;
    Gf2Matrix m = zero_bit_matrix();
    while (bits) {
        if (bits & 1) {
            Gf2Matrix next;
            for (int i = 0; i < 32; ++i) next[i] = gf2_times(m, acc[i]);
            acc = next;
        }
        m = gf2_square(m);
        bits >>= 1;
    }
    matrix_ = acc;
}

Checksum32 CrcShiftOp::apply(Checksum32 c) const {
    return gf2_times(matrix_, c);
}

Checksum32 incremental_page_checksum(Checksum32 old_page_crc,
                                     std::span<const uint8_t> diff,
                                     size_t offset_in_page, size_t page_size) {
    if (offset_in_page % diff.size() != 0 || offset_in_page >= page_size)
        throw std::invalid_argument("incremental_page_checksum: offset not line-aligned");
    uint64_t trailing = page_size - offset_in_page - diff.size();
    return old_page_crc ^ crc_shift(crc_raw(diff), trailing);
}

}  // namespace nvred
