#include "nvred/workload.hpp"

#include <cstring>
#include <random>
#include <stdexcept>

namespace nvred {
namespace {

constexpr double kScaleFactor = 3.0;

uint64_t splitmix(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

uint64_t mix(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    return splitmix(splitmix(splitmix(seed ^ a) + b) + c);
}

double to_unit(uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

void shuffle_u32(std::vector<uint32_t>& v, std::mt19937_64& rng) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

bool is_stream(WorkloadKind k) {
    return k == WorkloadKind::StreamCopy || k == WorkloadKind::StreamScale ||
           k == WorkloadKind::StreamAdd || k == WorkloadKind::StreamTriad;
}

}  // namespace

const char* to_string(WorkloadKind k) {
    switch (k) {
        case WorkloadKind::SeqRead: return "seq_read";
        case WorkloadKind::SeqWrite: return "seq_write";
        case WorkloadKind::RandRead: return "rand_read";
        case WorkloadKind::RandWrite: return "rand_write";
        case WorkloadKind::StreamCopy: return "stream_copy";
        case WorkloadKind::StreamScale: return "stream_scale";
        case WorkloadKind::StreamAdd: return "stream_add";
        case WorkloadKind::StreamTriad: return "stream_triad";
        case WorkloadKind::KvSkewed: return "kv_skewed";
        case WorkloadKind::LogAppend: return "log_append";
    }
    return "?";
}

std::optional<WorkloadKind> workload_kind_from_string(const std::string& s) {
    for (int i = 0; i <= int(WorkloadKind::LogAppend); ++i)
        if (s == to_string(WorkloadKind(i))) return WorkloadKind(i);
    return std::nullopt;
}

void WorkloadSpec::validate() const {
    if (threads == 0) throw std::invalid_argument("workload: need at least one thread");
    if (region_bytes < 4096 || region_bytes % 4096 != 0)
        throw std::invalid_argument("workload: region_bytes must be a positive page multiple");
    if (txn_size == 0) throw std::invalid_argument("workload: txn_size must be positive");
    if (update_fraction < 0 || update_fraction > 1)
        throw std::invalid_argument("workload: update_fraction must lie in [0, 1]");
    if (kind == WorkloadKind::LogAppend && txn_size > lines_per_thread())
        throw std::invalid_argument("workload: region too small for one log node");
}

WorkloadGenerator::WorkloadGenerator(const WorkloadSpec& spec)
    : spec_(spec), lines_(spec.lines_per_thread()) {
    spec_.validate();
    threads_.resize(spec_.threads);

    switch (spec_.kind) {
        case WorkloadKind::SeqRead:
        case WorkloadKind::SeqWrite:
            per_thread_events_ = lines_;
            break;
        case WorkloadKind::RandRead:
        case WorkloadKind::RandWrite:
            per_thread_events_ = lines_;
            for (uint32_t t = 0; t < spec_.threads; ++t) {
                auto& perm = threads_[t].perm;
                perm.resize(lines_);
                for (uint64_t i = 0; i < lines_; ++i) perm[i] = i;
                std::mt19937_64 rng(mix(spec_.seed, 0xA11CE, t));
                shuffle_u32(perm, rng);
            }
            break;
        case WorkloadKind::StreamCopy:
        case WorkloadKind::StreamScale:
            per_thread_events_ = lines_ / 2 * 2;
            setup_per_thread_ = lines_ / 2;
            break;
        case WorkloadKind::StreamAdd:
        case WorkloadKind::StreamTriad:
            per_thread_events_ = lines_ / 3 * 3;
            setup_per_thread_ = lines_ / 3 * 2;
            break;
        case WorkloadKind::KvSkewed:
            per_thread_events_ = lines_;
            for (uint32_t t = 0; t < spec_.threads; ++t) {
                auto& keys = threads_[t].keys;
                keys.resize(lines_);
                for (uint64_t i = 0; i < lines_; ++i) keys[i] = i;
                std::mt19937_64 rng(mix(spec_.seed, 0x5eed, t));
                shuffle_u32(keys, rng);
            }
            break;
        case WorkloadKind::LogAppend: {
            uint64_t slots = lines_ / spec_.txn_size;
            per_thread_events_ = slots * spec_.txn_size;
            for (uint32_t t = 0; t < spec_.threads; ++t) {
                auto& perm = threads_[t].perm;
                perm.resize(slots);
                for (uint64_t i = 0; i < slots; ++i) perm[i] = i;
                std::mt19937_64 rng(mix(spec_.seed, 0x10c, t));
                shuffle_u32(perm, rng);
            }
            break;
        }
    }
}

CacheLine WorkloadGenerator::stored_value(uint32_t t, uint64_t region_line) const {
    // Deterministic initial contents of a source-array line: 8 doubles.
    CacheLine out;
    for (int w = 0; w < 8; ++w) {
        double v = to_unit(mix(spec_.seed, 0xDA7A, t, region_line * 8 + w));
        std::memcpy(out.data() + w * 8, &v, 8);
    }
    return out;
}

bool WorkloadGenerator::next_setup(RawEvent& out) {
    if (!is_stream(spec_.kind)) return false;
    uint64_t total = setup_per_thread_ * spec_.threads;
    if (setup_cursor_ >= total) return false;
    uint32_t t = setup_cursor_ % spec_.threads;
    uint64_t pos = setup_cursor_ / spec_.threads;
    ++setup_cursor_;

    uint64_t third = lines_ / 3;
    uint64_t line = 0;
    switch (spec_.kind) {
        case WorkloadKind::StreamCopy:
        case WorkloadKind::StreamScale:
            line = pos;  // the source array occupies the low half
            break;
        case WorkloadKind::StreamAdd:
            line = pos;  // arrays a then b
            break;
        case WorkloadKind::StreamTriad:
            line = third + pos;  // arrays b then c
            break;
        default: return false;
    }
    out = RawEvent{t, true, line, stored_value(t, line), pos + 1 == setup_per_thread_};
    return true;
}

bool WorkloadGenerator::thread_event(uint32_t t, uint64_t pos, RawEvent& out) const {
    if (pos >= per_thread_events_) return false;
    const uint64_t third = lines_ / 3, half = lines_ / 2;
    out.thread = t;
    out.is_store = false;
    out.payload = CacheLine{};
    out.txn_boundary =
        ((pos + 1) % spec_.txn_size == 0) || (pos + 1 == per_thread_events_);

    auto words = [&](uint64_t line, double (&v)[8]) {
        CacheLine l = stored_value(t, line);
        std::memcpy(v, l.data(), 64);
    };

    switch (spec_.kind) {
        case WorkloadKind::SeqRead:
            out.region_line = pos;
            break;
        case WorkloadKind::SeqWrite:
            out.region_line = pos;
            out.is_store = true;
            break;
        case WorkloadKind::RandRead:
            out.region_line = threads_[t].perm[pos];
            break;
        case WorkloadKind::RandWrite:
            out.region_line = threads_[t].perm[pos];
            out.is_store = true;
            break;
        case WorkloadKind::StreamCopy: {
            uint64_t k = pos / 2;
            if (pos % 2 == 0) {
                out.region_line = k;
            } else {
                out.region_line = half + k;
                out.is_store = true;
                out.payload = stored_value(t, k);
            }
            break;
        }
        case WorkloadKind::StreamScale: {
            uint64_t k = pos / 2;
            if (pos % 2 == 0) {
                out.region_line = k;
            } else {
                out.region_line = half + k;
                out.is_store = true;
                double v[8];
                words(k, v);
                for (int w = 0; w < 8; ++w) {
                    double s = kScaleFactor * v[w];
                    std::memcpy(out.payload.data() + w * 8, &s, 8);
                }
            }
            break;
        }
        case WorkloadKind::StreamAdd: {
            uint64_t k = pos / 3;
            int step = pos % 3;
            if (step == 0) {
                out.region_line = k;  // a
            } else if (step == 1) {
                out.region_line = third + k;  // b
            } else {
                out.region_line = 2 * third + k;  // c = a + b
                out.is_store = true;
                double a[8], b[8];
                words(k, a);
                words(third + k, b);
                for (int w = 0; w < 8; ++w) {
                    double s = a[w] + b[w];
                    std::memcpy(out.payload.data() + w * 8, &s, 8);
                }
            }
            break;
        }
        case WorkloadKind::StreamTriad: {
            uint64_t k = pos / 3;
            int step = pos % 3;
            if (step == 0) {
                out.region_line = third + k;  // b
            } else if (step == 1) {
                out.region_line = 2 * third + k;  // c
            } else {
                out.region_line = k;  // a = b + q*c
                out.is_store = true;
                double b[8], c[8];
                words(third + k, b);
                words(2 * third + k, c);
                for (int w = 0; w < 8; ++w) {
                    double s = b[w] + kScaleFactor * c[w];
                    std::memcpy(out.payload.data() + w * 8, &s, 8);
                }
            }
            break;
        }
        case WorkloadKind::KvSkewed: {
            const auto& keys = threads_[t].keys;
            uint64_t hot_count = uint64_t(lines_ * kKvHotKeyFraction);
            if (hot_count == 0) hot_count = 1;
            bool hot = to_unit(mix(spec_.seed, 0x407, t, pos)) < kKvHotOpsFraction;
            uint64_t span = hot ? hot_count : lines_ - hot_count;
            uint64_t idx = mix(spec_.seed, 0x1d, t, pos) % span;
            out.region_line = keys[hot ? idx : hot_count + idx];
            out.is_store = to_unit(mix(spec_.seed, 0x0b, t, pos)) < spec_.update_fraction;
            if (out.is_store) {
                for (int w = 0; w < 8; ++w) {
                    uint64_t h = mix(spec_.seed, 0xF00D, t, pos * 8 + w);
                    std::memcpy(out.payload.data() + w * 8, &h, 8);
                }
            }
            break;
        }
        case WorkloadKind::LogAppend: {
            uint64_t node = pos / spec_.txn_size;
            uint64_t within = pos % spec_.txn_size;
            out.region_line = uint64_t(threads_[t].perm[node]) * spec_.txn_size + within;
            out.is_store = true;
            for (int w = 0; w < 8; ++w) {
                uint64_t h = mix(spec_.seed, 0x106a, t, pos * 8 + w);
                std::memcpy(out.payload.data() + w * 8, &h, 8);
            }
            break;
        }
    }
    return true;
}

bool WorkloadGenerator::next(RawEvent& out) {
    uint64_t total = per_thread_events_ * spec_.threads;
    if (cursor_ >= total) return false;
    uint32_t t = cursor_ % spec_.threads;
    uint64_t pos = cursor_ / spec_.threads;
    ++cursor_;
    bool ok = thread_event(t, pos, out);
    return ok;
}

}  // namespace nvred
