// audit.hpp - Full-state redundancy consistency audit. Recomputes, from
// media contents alone, every page system-checksum, per-line checksum
// entry, object checksum and stripe parity line that the active mode
// maintains, and compares them with the stored values. The machine must be
// drained first so that media is the single source of truth.
#pragma once

#include <string>

#include "nvred/machine.hpp"

namespace nvred {

struct AuditReport {
    bool ok = true;
    uint64_t pages_checked = 0;
    uint64_t entries_checked = 0;
    uint64_t parity_lines_checked = 0;
    std::string first_error;
};

AuditReport audit_redundancy(Machine& machine);

}  // namespace nvred
