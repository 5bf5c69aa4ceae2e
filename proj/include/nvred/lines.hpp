// lines.hpp - 64-byte cache line value type and the XOR algebra used by
// diff-based checksum/parity maintenance and stripe reconstruction.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace nvred {

inline constexpr size_t kLineSize = 64;

using CacheLine = std::array<uint8_t, kLineSize>;

inline CacheLine zero_line() { return CacheLine{}; }

inline bool is_zero(const CacheLine& a) {
    for (uint8_t b : a)
        if (b) return false;
    return true;
}

// Bytewise XOR; a diff applied twice restores the original.
inline CacheLine line_diff(const CacheLine& old_line, const CacheLine& new_line) {
    CacheLine d;
    for (size_t i = 0; i < kLineSize; ++i) d[i] = old_line[i] ^ new_line[i];
    return d;
}

inline void xor_into(CacheLine& acc, const CacheLine& other) {
    for (size_t i = 0; i < kLineSize; ++i) acc[i] ^= other[i];
}

inline CacheLine parity_update(const CacheLine& parity_line, const CacheLine& diff) {
    return line_diff(parity_line, diff);
}

// XOR of one stripe-relative line from every surviving stripe member;
// equals the missing member's line.
CacheLine reconstruct_line(std::span<const CacheLine> surviving_lines,
                           size_t expected_count);

}  // namespace nvred
