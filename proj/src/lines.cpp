#include "nvred/lines.hpp"

#include <stdexcept>

namespace nvred {

CacheLine reconstruct_line(std::span<const CacheLine> surviving_lines,
                           size_t expected_count) {
    if (surviving_lines.size() != expected_count)
        throw std::invalid_argument("reconstruct_line: malformed stripe, expected " +
                                    std::to_string(expected_count) + " survivors, got " +
                                    std::to_string(surviving_lines.size()));
    CacheLine out{};
    for (const CacheLine& l : surviving_lines) xor_into(out, l);
    return out;
}

}  // namespace nvred
