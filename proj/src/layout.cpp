#include "nvred/layout.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace nvred {
namespace {

uint64_t round_up(uint64_t v, uint64_t unit) { return (v + unit - 1) / unit * unit; }

[[noreturn]] void bad_addr(const char* what, uint64_t addr) {
    throw std::out_of_range(std::string(what) + ": address 0x" +
                            std::to_string(addr) + " outside expected region");
}

}  // namespace

void PageGeometry::validate() const {
    if (line_size == 0 || line_size % 4 != 0)
        throw std::invalid_argument("line_size must be a positive multiple of 4");
    if (page_size == 0 || page_size % line_size != 0)
        throw std::invalid_argument("page_size must be a positive multiple of line_size");
}

RedundancyLayout::RedundancyLayout(uint32_t num_dimms, uint64_t dimm_capacity,
                                   PageGeometry geom)
    : num_dimms_(num_dimms), dimm_capacity_(dimm_capacity), geom_(geom) {
    geom_.validate();
    if (num_dimms_ < 2)
        throw std::invalid_argument("need at least 2 DIMMs for cross-DIMM parity");

    const uint64_t page = geom_.page_size;
    const uint64_t n = num_dimms_;
    // Per-row cost on one DIMM: the page itself, its share of system- and
    // object-checksum entries, and a 1/8 arena share for per-line checksum
    // buffers. Estimate then shrink until everything fits.
    const uint64_t objs_per_page = page / kLineSize;
    const uint64_t per_row = page + 4 * (n - 1) / n + 4 * objs_per_page * (n - 1) / n + page / 8;
    uint64_t rows = dimm_capacity_ / per_row / n * n;
    auto fits = [&](uint64_t r) {
        if (r == 0) return false;
        uint64_t data_pages = r / n * (n - 1);
        uint64_t syscsum = round_up(4 * data_pages, page);
        uint64_t objcsum = round_up(4 * data_pages * objs_per_page, page);
        uint64_t arena = round_up(r * page / 8, page);
        return r * page + syscsum + objcsum + arena <= dimm_capacity_;
    };
    while (rows >= n && !fits(rows)) rows -= n;
    if (rows < n)
        throw std::invalid_argument("dimm_capacity too small for one stripe rotation");
    rows_ = rows;

    uint64_t data_pages = data_pages_per_dimm();
    syscsum_base_ = rows_ * page;
    syscsum_bytes_ = round_up(4 * data_pages, page);
    objcsum_base_ = syscsum_base_ + syscsum_bytes_;
    objcsum_bytes_ = round_up(4 * data_pages * objs_per_page, page);
    arena_base_ = objcsum_base_ + objcsum_bytes_;
    arena_bytes_ = round_up(rows_ * page / 8, page);
}

uint32_t RedundancyLayout::dimm_of(uint64_t addr) const {
    if (addr >= total_bytes()) bad_addr("dimm_of", addr);
    return addr / dimm_capacity_;
}

bool RedundancyLayout::in_striped_extent(uint64_t addr) const {
    return addr < total_bytes() && dimm_offset(addr) < rows_ * geom_.page_size;
}

uint64_t RedundancyLayout::row_of(uint64_t addr) const {
    if (!in_striped_extent(addr)) bad_addr("row_of", addr);
    return dimm_offset(addr) / geom_.page_size;
}

bool RedundancyLayout::is_parity_page(uint64_t addr) const {
    return in_striped_extent(addr) &&
           parity_dimm_of_row(row_of(addr)) == dimm_of(addr);
}

bool RedundancyLayout::is_data_page(uint64_t addr) const {
    return in_striped_extent(addr) &&
           parity_dimm_of_row(row_of(addr)) != dimm_of(addr);
}

bool RedundancyLayout::is_redundancy_addr(uint64_t addr) const {
    if (addr >= total_bytes()) return false;
    if (in_striped_extent(addr)) return is_parity_page(addr);
    return true;  // checksum regions and arena
}

uint64_t RedundancyLayout::data_page_addr(uint64_t logical_page) const {
    if (logical_page >= total_data_pages())
        throw std::out_of_range("data_page_addr: logical page " +
                                std::to_string(logical_page) + " out of range");
    uint64_t row = logical_page / (num_dimms_ - 1);
    uint32_t k = logical_page % (num_dimms_ - 1);
    uint32_t q = parity_dimm_of_row(row);
    uint32_t dimm = (k < q) ? k : k + 1;
    return dimm_base(dimm) + row * geom_.page_size;
}

uint64_t RedundancyLayout::logical_page_of(uint64_t addr) const {
    if (!is_data_page(addr)) bad_addr("logical_page_of", addr);
    uint64_t row = row_of(addr);
    uint32_t d = dimm_of(addr);
    uint32_t q = parity_dimm_of_row(row);
    uint32_t k = (d < q) ? d : d - 1;
    return row * (num_dimms_ - 1) + k;
}

uint64_t RedundancyLayout::file_alignment_pages(void) const {
    // Rows r such that the per-DIMM data index r*(n-1)/n is a multiple of
    // the 16 checksum entries per line; stripe (row) alignment follows.
    uint64_t per_line = geom_.checksums_per_line();
    uint64_t rows = num_dimms_ * per_line / std::gcd<uint64_t>(num_dimms_ - 1, per_line);
    return rows * (num_dimms_ - 1);
}

uint64_t RedundancyLayout::per_dimm_data_index(uint64_t addr) const {
    if (!is_data_page(addr)) bad_addr("per_dimm_data_index", addr);
    uint64_t row = row_of(addr);
    uint32_t d = dimm_of(addr);
    // Parity rows on DIMM d are d, d+n, d+2n, ...
    uint64_t parity_rows_before = (row > d) ? (row - d - 1) / num_dimms_ + 1 : 0;
    return row - parity_rows_before;
}

uint64_t RedundancyLayout::system_checksum_addr(uint64_t page_addr) const {
    if (!is_data_page(page_addr)) bad_addr("system_checksum_addr", page_addr);
    return syscsum_base(dimm_of(page_addr)) + 4 * per_dimm_data_index(page_addr);
}

ParityLocation RedundancyLayout::parity_addr(uint64_t page_addr) const {
    if (is_parity_page(page_addr))
        throw std::invalid_argument("parity_addr: parity pages are never DAX-mapped data");
    if (!is_data_page(page_addr)) bad_addr("parity_addr", page_addr);
    uint64_t row = row_of(page_addr);
    uint32_t q = parity_dimm_of_row(row);
    return {q, dimm_base(q) + row * geom_.page_size};
}

uint64_t RedundancyLayout::object_checksum_addr(uint64_t page_addr, uint64_t offset_in_page,
                                                uint64_t object_size) const {
    if (object_size == 0 || object_size % kLineSize != 0 ||
        geom_.page_size % object_size != 0)
        throw std::invalid_argument("object_size must be a line multiple dividing the page size");
    if (!is_data_page(page_addr)) bad_addr("object_checksum_addr", page_addr);
    if (offset_in_page >= geom_.page_size || offset_in_page % object_size != 0)
        throw std::invalid_argument("object offset not aligned within page");
    // Region is provisioned for line-sized objects, the densest case.
    uint64_t slots_per_page = geom_.page_size / kLineSize;
    uint64_t slot = per_dimm_data_index(page_addr) * slots_per_page +
                    offset_in_page / object_size;
    return objcsum_base(dimm_of(page_addr)) + 4 * slot;
}

uint64_t dax_cl_checksum_addr(uint64_t line_addr, const DaxClChecksumBuffer& buf,
                              const RedundancyLayout& layout) {
    const PageGeometry& g = layout.geometry();
    if (line_addr % g.line_size != 0)
        throw std::invalid_argument("dax_cl_checksum_addr: line address not aligned");
    uint64_t page_addr = line_addr / g.page_size * g.page_size;
    uint64_t logical = layout.logical_page_of(page_addr);
    if (logical < buf.first_logical_page ||
        logical >= buf.first_logical_page + buf.page_count)
        throw std::out_of_range("dax_cl_checksum_addr: line outside covered range");
    uint64_t line_index = (logical - buf.first_logical_page) * g.lines_per_page() +
                          (line_addr % g.page_size) / g.line_size;
    return buf.base + 4 * line_index;
}

}  // namespace nvred
