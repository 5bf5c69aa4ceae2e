#include "nvred/audit.hpp"

#include <set>
#include <vector>

#include "nvred/crc32c.hpp"

namespace nvred {
namespace {

void fail(AuditReport& r, const std::string& what) {
    if (r.ok) r.first_error = what;
    r.ok = false;
}

}  // namespace

AuditReport audit_redundancy(Machine& m) {
    AuditReport report;
    const RedundancyLayout& layout = m.layout();
    const PageGeometry& g = layout.geometry();
    NvmDevice& dev = m.device();
    RedundancyController& ctrl = m.controller();
    ControllerMode mode = ctrl.mode();

    if (m.hierarchy().llc().resident_lines() != 0) {
        fail(report, "audit requires a drained machine");
        return report;
    }
    if (mode == ControllerMode::Off) return report;  // nothing maintained

    bool check_syscsum = mode == ControllerMode::Naive || mode == ControllerMode::EV ||
                         mode == ControllerMode::EVU || mode == ControllerMode::TxBPage;
    bool check_objcsum = mode == ControllerMode::TxBObject;
    const uint64_t object_size = ctrl.config().object_size;

    std::set<uint64_t> rows;
    for (const DaxMapping& map : ctrl.mappings()) {
        for (uint64_t p = 0; p < map.page_count; ++p) {
            uint64_t page_addr = layout.data_page_addr(map.first_logical_page + p);
            rows.insert(layout.row_of(page_addr));
            std::vector<uint8_t> bytes(g.page_size);
            for (uint64_t l = 0; l < g.lines_per_page(); ++l) {
                CacheLine line = dev.peek_line(page_addr + l * kLineSize);
                std::copy(line.begin(), line.end(), bytes.begin() + l * kLineSize);
                if (map.buf.size_bytes) {
                    uint64_t entry = dax_cl_checksum_addr(page_addr + l * kLineSize, map.buf, layout);
                    ++report.entries_checked;
                    if (dev.peek_u32(entry) != crc32c(line))
                        fail(report, "per-line checksum mismatch at line " +
                                         std::to_string(page_addr + l * kLineSize));
                }
            }
            if (check_syscsum) {
                uint64_t entry = layout.system_checksum_addr(page_addr);
                ++report.entries_checked;
                if (dev.peek_u32(entry) != crc32c(bytes))
                    fail(report,
                         "page system-checksum mismatch at page " + std::to_string(page_addr));
            }
            if (check_objcsum) {
                for (uint64_t off = 0; off < g.page_size; off += object_size) {
                    std::vector<uint8_t> obj(bytes.begin() + off,
                                             bytes.begin() + off + object_size);
                    uint64_t entry = layout.object_checksum_addr(page_addr, off, object_size);
                    ++report.entries_checked;
                    if (dev.peek_u32(entry) != crc32c(obj))
                        fail(report, "object checksum mismatch at page " +
                                         std::to_string(page_addr) + " offset " +
                                         std::to_string(off));
                }
            }
            ++report.pages_checked;
        }
    }

    // Stripe parity over every row any mapping touches.
    for (uint64_t row : rows) {
        uint32_t q = layout.parity_dimm_of_row(row);
        uint64_t parity_page = layout.dimm_base(q) + row * g.page_size;
        for (uint64_t l = 0; l < g.lines_per_page(); ++l) {
            CacheLine expect{};
            for (uint32_t d = 0; d < layout.num_dimms(); ++d) {
                if (d == q) continue;
                xor_into(expect, dev.peek_line(layout.dimm_base(d) + row * g.page_size +
                                               l * kLineSize));
            }
            ++report.parity_lines_checked;
            if (dev.peek_line(parity_page + l * kLineSize) != expect) {
                fail(report, "parity mismatch at row " + std::to_string(row) + " line " +
                                 std::to_string(l));
                break;
            }
        }
    }
    return report;
}

}  // namespace nvred
