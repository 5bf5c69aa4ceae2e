// crc32c.hpp - CRC-32C (Castagnoli) primitives with incremental update support.
//
// Two flavours are exposed:
//   crc32c()  - the standard checksum (init 0xFFFFFFFF, final xor 0xFFFFFFFF),
//               used for page system-checksums and per-line checksums.
//   crc_raw() - the bare linear core (init 0, no final xor). It satisfies
//               crc_raw(a ^ b) == crc_raw(a) ^ crc_raw(b) for equal lengths,
//               which is what makes diff-based checksum updates possible.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace nvred {

using Checksum32 = uint32_t;

// Reflected form of the Castagnoli polynomial 0x1EDC6F41.
inline constexpr uint32_t kCrc32cPolyReflected = 0x82F63B78u;

Checksum32 crc32c(std::span<const uint8_t> data);
Checksum32 crc_raw(std::span<const uint8_t> data);

// Checksum of (m || n zero bytes) given c == crc_raw(m). Computed as
// multiplication by x^(8n) modulo the CRC polynomial, O(log n) squarings.
Checksum32 crc_shift(Checksum32 c, uint64_t zero_bytes);

// The same shift with the operator matrix built once; applying it is a
// single 32x32 GF(2) matrix-vector product. Worth it on hot update paths
// where the shift distance repeats (one per line offset within a page).
class CrcShiftOp {
public:
    explicit CrcShiftOp(uint64_t zero_bytes);
    Checksum32 apply(Checksum32 c) const;

private:
    std::array<uint32_t, 32> matrix_;
};

// New whole-page checksum after XOR-ing `diff` into the page at `offset`,
// given `old_page_crc` == crc32c(old page). No page read required:
// the init/final-xor terms cancel between equal-length messages, so the
// delta is crc_raw(diff) shifted by the bytes that follow the line.
Checksum32 incremental_page_checksum(Checksum32 old_page_crc,
                                     std::span<const uint8_t> diff,
                                     size_t offset_in_page, size_t page_size);

}  // namespace nvred
