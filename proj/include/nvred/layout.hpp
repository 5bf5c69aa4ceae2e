// layout.hpp - Physical address-space geometry of the NVM DIMM array.
//
// Each DIMM holds, in order:
//   [0, rows*page)            the striped extent: data and parity pages,
//                             rotated RAID-5 style (row r's page on DIMM
//                             r % num_dimms is that stripe's parity page)
//   [syscsum_base, +bytes)    4-byte page system-checksums, one per data
//                             page of the same DIMM, packed 16 per line
//   [objcsum_base, +bytes)    per-object checksums for the software
//                             page/object baselines (same-DIMM rule)
//   [arena_base, +bytes)      allocation arena for per-line checksum
//                             buffers of DAX-mapped files
//
// A stripe is the set of num_dimms pages at equal row across the DIMMs;
// one of them is parity, the other num_dimms-1 hold data. Logical data
// pages enumerate the data pages stripe by stripe, so logically
// consecutive pages share a parity page.
#pragma once

#include <cstdint>
#include <vector>

#include "nvred/lines.hpp"

namespace nvred {

struct PageGeometry {
    uint64_t page_size = 4096;
    uint64_t line_size = kLineSize;

    uint64_t lines_per_page() const { return page_size / line_size; }
    uint64_t checksums_per_line() const { return line_size / 4; }
    void validate() const;
};

struct ParityLocation {
    uint32_t dimm;
    uint64_t page_addr;
};

class RedundancyLayout {
public:
    RedundancyLayout(uint32_t num_dimms, uint64_t dimm_capacity,
                     PageGeometry geom = {});

    uint32_t num_dimms() const { return num_dimms_; }
    uint64_t dimm_capacity() const { return dimm_capacity_; }
    const PageGeometry& geometry() const { return geom_; }
    uint32_t stripe_width() const { return num_dimms_; }

    uint64_t rows() const { return rows_; }
    uint64_t data_pages_per_dimm() const { return rows_ / num_dimms_ * (num_dimms_ - 1); }
    uint64_t total_data_pages() const { return rows_ * (num_dimms_ - 1); }
    uint64_t total_bytes() const { return dimm_capacity_ * num_dimms_; }

    uint32_t dimm_of(uint64_t addr) const;
    uint64_t dimm_base(uint32_t dimm) const { return uint64_t(dimm) * dimm_capacity_; }
    uint64_t dimm_offset(uint64_t addr) const { return addr % dimm_capacity_; }

    bool in_striped_extent(uint64_t addr) const;
    uint64_t row_of(uint64_t addr) const;
    uint32_t parity_dimm_of_row(uint64_t row) const { return row % num_dimms_; }
    bool is_parity_page(uint64_t addr) const;
    bool is_data_page(uint64_t addr) const;

    // Anything that is not a data page: parity, checksum regions, arena.
    bool is_redundancy_addr(uint64_t addr) const;

    // Logical data page numbering: stripe-major, member DIMMs ascending.
    uint64_t data_page_addr(uint64_t logical_page) const;
    uint64_t logical_page_of(uint64_t addr) const;

    // Smallest logical-page alignment at which distinct files share no
    // parity page and no system-checksum line. Private caches then never
    // write-share a line between threads working on distinct files.
    uint64_t file_alignment_pages() const;

    // Per-DIMM data page index (parity rows excluded); basis for the
    // system-checksum packing.
    uint64_t per_dimm_data_index(uint64_t addr) const;

    // Address of the 4-byte system-checksum entry for a data page, in the
    // checksum region of the page's own DIMM.
    uint64_t system_checksum_addr(uint64_t page_addr) const;

    // Parity page serving the stripe that contains this data page.
    ParityLocation parity_addr(uint64_t page_addr) const;

    // 4-byte object checksum entry for the object at `offset_in_page` of a
    // data page. object_size must divide the page size and be a multiple
    // of the line size.
    uint64_t object_checksum_addr(uint64_t page_addr, uint64_t offset_in_page,
                                  uint64_t object_size) const;

    // Region accessors (per-DIMM offsets are identical across DIMMs).
    uint64_t syscsum_base(uint32_t dimm) const { return dimm_base(dimm) + syscsum_base_; }
    uint64_t syscsum_bytes() const { return syscsum_bytes_; }
    uint64_t objcsum_base(uint32_t dimm) const { return dimm_base(dimm) + objcsum_base_; }
    uint64_t objcsum_bytes() const { return objcsum_bytes_; }
    uint64_t arena_base(uint32_t dimm) const { return dimm_base(dimm) + arena_base_; }
    uint64_t arena_bytes() const { return arena_bytes_; }

private:
    uint32_t num_dimms_;
    uint64_t dimm_capacity_;
    PageGeometry geom_;
    uint64_t rows_;
    uint64_t syscsum_base_ = 0, syscsum_bytes_ = 0;
    uint64_t objcsum_base_ = 0, objcsum_bytes_ = 0;
    uint64_t arena_base_ = 0, arena_bytes_ = 0;
};

// Per-line checksum buffer covering one DAX-mapped file. Lives in an NVM
// arena while the file is mapped; entry i sits at byte offset 4*i, packing
// 16 entries per 64-byte buffer line.
struct DaxClChecksumBuffer {
    uint64_t base = 0;
    uint64_t first_logical_page = 0;
    uint64_t page_count = 0;
    uint64_t size_bytes = 0;

    uint64_t covered_lines(const PageGeometry& g) const {
        return page_count * g.lines_per_page();
    }
};

// Address of the 4-byte per-line checksum entry for a data line. Errors if
// the line is outside the buffer's covered range.
uint64_t dax_cl_checksum_addr(uint64_t line_addr, const DaxClChecksumBuffer& buf,
                              const RedundancyLayout& layout);

}  // namespace nvred
