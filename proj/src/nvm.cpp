#include "nvred/nvm.hpp"

#include <cstring>
#include <stdexcept>

#include "nvred/crc32c.hpp"

namespace nvred {

void NvmConfig::validate() const {
    if (num_dimms < 2) throw std::invalid_argument("nvm: need at least 2 DIMMs");
    if (read_latency_ns <= 0 || write_latency_ns <= 0 || energy_read_nj <= 0 ||
        energy_write_nj <= 0)
        throw std::invalid_argument("nvm: latencies and energies must be strictly positive");
    if (dimm_capacity == 0) throw std::invalid_argument("nvm: dimm_capacity must be positive");
}

const char* to_string(FaultKind kind) {
    switch (kind) {
        case FaultKind::LostWrite: return "lost_write";
        case FaultKind::MisdirectedWrite: return "misdirected_write";
        case FaultKind::MisdirectedRead: return "misdirected_read";
    }
    return "?";
}

void FaultScheduleEntry::validate() const {
    if (occurrence == 0) throw std::invalid_argument("fault occurrence ordinal is 1-based");
    if (kind != FaultKind::LostWrite && misdirect_target == target_line)
        throw std::invalid_argument("misdirect_target must differ from the trigger address");
}

NvmDevice::NvmDevice(const RedundancyLayout& layout, const NvmConfig& cfg,
                     AccessCounters* counters)
    : layout_(layout), cfg_(cfg), counters_(counters) {
    cfg_.validate();
    std::vector<uint8_t> zero_page(layout_.geometry().page_size, 0);
    syscsum_fill_ = crc32c(zero_page);
    objcsum_fill_ = crc32c(std::vector<uint8_t>(kLineSize, 0));
}

void NvmDevice::set_objcsum_format(uint32_t fill, uint32_t slot_stride) {
    if (slot_stride == 0) throw std::invalid_argument("objcsum slot stride must be positive");
    objcsum_fill_ = fill;
    objcsum_stride_ = slot_stride;
    // Only valid before any object-checksum page is touched.
}

void NvmDevice::format_page(uint64_t page_base, uint8_t* bytes) const {
    const uint64_t page = layout_.geometry().page_size;
    std::memset(bytes, 0, page);
    uint32_t d = layout_.dimm_of(page_base);
    uint64_t off = layout_.dimm_offset(page_base);
    uint64_t sys0 = layout_.syscsum_base(d) - layout_.dimm_base(d);
    uint64_t obj0 = layout_.objcsum_base(d) - layout_.dimm_base(d);
    if (off >= sys0 && off < sys0 + layout_.syscsum_bytes()) {
        for (uint64_t i = 0; i < page; i += 4)
            std::memcpy(bytes + i, &syscsum_fill_, 4);
    } else if (off >= obj0 && off < obj0 + layout_.objcsum_bytes()) {
        uint64_t slot0 = (off - obj0) / 4;
        for (uint64_t i = 0; i < page / 4; ++i)
            if ((slot0 + i) % objcsum_stride_ == 0)
                std::memcpy(bytes + i * 4, &objcsum_fill_, 4);
    }
}

uint8_t* NvmDevice::page_for(uint64_t addr, bool materialize) {
    const uint64_t page = layout_.geometry().page_size;
    uint64_t idx = addr / page;
    auto it = pages_.find(idx);
    if (it != pages_.end()) return it->second.get();
    if (!materialize) return nullptr;
    auto bytes = std::make_unique<uint8_t[]>(page);
    format_page(idx * page, bytes.get());
    uint8_t* raw = bytes.get();
    pages_.emplace(idx, std::move(bytes));
    return raw;
}

void NvmDevice::check_mapped(uint64_t line_addr) const {
    if (line_addr % kLineSize != 0)
        throw std::invalid_argument("nvm access not line-aligned");
    if (line_addr + kLineSize > layout_.total_bytes())
        throw std::out_of_range("nvm access beyond device capacity");
}

CacheLine NvmDevice::load(uint64_t line_addr) const {
    CacheLine out;
    const uint8_t* p = const_cast<NvmDevice*>(this)->page_for(line_addr, true);
    std::memcpy(out.data(), p + line_addr % layout_.geometry().page_size, kLineSize);
    return out;
}

void NvmDevice::store(uint64_t line_addr, const CacheLine& content) {
    uint8_t* p = page_for(line_addr, true);
    std::memcpy(p + line_addr % layout_.geometry().page_size, content.data(), kLineSize);
}

void NvmDevice::arm(std::vector<FaultScheduleEntry> schedule) {
    for (const auto& e : schedule) e.validate();
    if (!schedule.empty()) track_ops_ = true;
    schedule_ = std::move(schedule);
}

void NvmDevice::mark_corrupted(uint64_t line_addr, size_t fired_index) {
    corrupted_[line_addr].push_back(fired_index);
}

NvmReadResult NvmDevice::read_line(uint64_t line_addr, NvmClass cls, uint32_t thread) {
    check_mapped(line_addr);
    ++ops_;
    counters_->record(thread, cls == NvmClass::Data ? SimEvent::NvmDataRead
                                                    : SimEvent::NvmRedundancyRead);
    if (track_ops_) {
        uint32_t n = ++read_ops_[line_addr];
        for (size_t i = 0; i < schedule_.size(); ++i) {
            FaultScheduleEntry& e = schedule_[i];
            if (!e.armed || e.kind != FaultKind::MisdirectedRead) continue;
            if (e.target_line != line_addr || e.occurrence != n) continue;
            e.armed = false;
            fired_.push_back({i, e.kind, e.target_line, e.misdirect_target, ops_});
            return {load(e.misdirect_target), true};
        }
    }
    return {load(line_addr), false};
}

void NvmDevice::write_line(uint64_t line_addr, const CacheLine& content, NvmClass cls,
                           uint32_t thread) {
    check_mapped(line_addr);
    ++ops_;
    counters_->record(thread, cls == NvmClass::Data ? SimEvent::NvmDataWrite
                                                    : SimEvent::NvmRedundancyWrite);
    if (track_ops_) {
        uint32_t n = ++write_ops_[line_addr];
        for (size_t i = 0; i < schedule_.size(); ++i) {
            FaultScheduleEntry& e = schedule_[i];
            if (!e.armed || e.kind == FaultKind::MisdirectedRead) continue;
            if (e.target_line != line_addr || e.occurrence != n) continue;
            e.armed = false;
            fired_.push_back({i, e.kind, e.target_line, e.misdirect_target, ops_});
            if (e.kind == FaultKind::LostWrite) {
                // Acknowledged, media untouched: target now stale.
                mark_corrupted(line_addr, fired_.size() - 1);
            } else {
                // Stored at the wrong location: source stale, victim corrupted.
                store(e.misdirect_target, content);
                mark_corrupted(line_addr, fired_.size() - 1);
                mark_corrupted(e.misdirect_target, fired_.size() - 1);
            }
            return;
        }
    }
    store(line_addr, content);
    // A successful overwrite clears staleness.
    if (!corrupted_.empty()) corrupted_.erase(line_addr);
}

CacheLine NvmDevice::peek_line(uint64_t line_addr) const {
    check_mapped(line_addr);
    return load(line_addr);
}

void NvmDevice::poke_line(uint64_t line_addr, const CacheLine& content) {
    check_mapped(line_addr);
    const_cast<NvmDevice*>(this)->store(line_addr, content);
}

uint32_t NvmDevice::peek_u32(uint64_t addr) const {
    CacheLine l = peek_line(addr / kLineSize * kLineSize);
    uint32_t v;
    std::memcpy(&v, l.data() + addr % kLineSize, 4);
    return v;
}

void NvmDevice::poke_u32(uint64_t addr, uint32_t value) {
    uint64_t line_addr = addr / kLineSize * kLineSize;
    CacheLine l = peek_line(line_addr);
    std::memcpy(l.data() + addr % kLineSize, &value, 4);
    poke_line(line_addr, l);
}

}  // namespace nvred
