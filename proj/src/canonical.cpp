#include "pgnav/canonical.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pgnav {

double hue_entropy(const std::array<std::uint32_t, kHueBinCount>& counts) {
    std::uint64_t total = 0;
    for (std::uint32_t c : counts) total += c;
    if (total == 0) return 0.0;
    double h = 0.0;
    for (std::uint32_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

// Strict total order on descriptors (hue counts, then occupancies). Used to
// resolve entropy ties: comparing shifted contents keeps the choice
// rotation-equivariant, which an index-based tie rule is not.
bool lmd_less(const LocalMapDescriptor& a, const LocalMapDescriptor& b) {
    for (int s = 0; s < kBevSectorCount; ++s)
        for (int h = 0; h < kHueBinCount; ++h) {
            const auto av = a.sector_hue_hist[static_cast<std::size_t>(s)]
                                             [static_cast<std::size_t>(h)];
            const auto bv = b.sector_hue_hist[static_cast<std::size_t>(s)]
                                             [static_cast<std::size_t>(h)];
            if (av != bv) return av < bv;
        }
    for (int s = 0; s < kBevSectorCount; ++s) {
        const double av = a.sector_occupancy[static_cast<std::size_t>(s)];
        const double bv = b.sector_occupancy[static_cast<std::size_t>(s)];
        if (av != bv) return av < bv;
    }
    return false;
}

} // namespace

CanonicalLmd canonicalize(const LocalMapDescriptor& d) {
    std::array<double, kBevSectorCount> entropy_at{};
    double best_h = 0.0;
    for (int k = 0; k < kBevSectorCount; ++k) {
        std::array<std::uint32_t, kHueBinCount> half{};
        for (int s = 0; s < kBevSectorCount / 2; ++s) {
            const auto& hist =
                d.sector_hue_hist[static_cast<std::size_t>((k + s) % kBevSectorCount)];
            for (int b = 0; b < kHueBinCount; ++b)
                half[static_cast<std::size_t>(b)] += hist[static_cast<std::size_t>(b)];
        }
        entropy_at[static_cast<std::size_t>(k)] = hue_entropy(half);
        if (k == 0 || entropy_at[static_cast<std::size_t>(k)] < best_h)
            best_h = entropy_at[static_cast<std::size_t>(k)];
    }
    int best_k = -1;
    LocalMapDescriptor best;
    for (int k = 0; k < kBevSectorCount; ++k) {
        if (entropy_at[static_cast<std::size_t>(k)] != best_h) continue;
        LocalMapDescriptor candidate = cyclic_shift(d, k);
        if (best_k < 0 || lmd_less(candidate, best)) {
            best_k = k;
            best = std::move(candidate);
        }
    }
    return CanonicalLmd{std::move(best), best_k, best_h};
}

namespace {

// FNV-1a over a byte stream, maintained as two independent 64-bit lanes.
struct Fnv128 {
    std::uint64_t a = 0xcbf29ce484222325ULL;
    std::uint64_t b = 0x6c62272e07bb0142ULL;
    void feed(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            const std::uint64_t byte = (v >> (8 * i)) & 0xff;
            a = (a ^ byte) * 0x100000001b3ULL;
            b = (b ^ (byte + 0x9eULL)) * 0x100000001b3ULL;
        }
    }
};

} // namespace

DedupKey dedup_key(const CanonicalLmd& c) {
    Fnv128 h;
    for (int s = 0; s < kBevSectorCount; ++s) {
        const auto& hist = c.descriptor.sector_hue_hist[static_cast<std::size_t>(s)];
        std::uint64_t total = 0;
        for (std::uint32_t v : hist) total += v;
        for (int b = 0; b < kHueBinCount; ++b) {
            const double p =
                total == 0 ? 0.0
                           : static_cast<double>(hist[static_cast<std::size_t>(b)]) /
                                 static_cast<double>(total);
            h.feed(static_cast<std::uint64_t>(std::llround(p * 32.0)));
        }
        h.feed(static_cast<std::uint64_t>(
            std::llround(c.descriptor.sector_occupancy[static_cast<std::size_t>(s)] * 16.0)));
    }
    return DedupKey{h.a, h.b};
}

std::string DedupKey::to_hex() const {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
    return buf;
}

DedupKey DedupKey::from_hex(const std::string& s) {
    if (s.size() != 32) throw std::invalid_argument("dedup key must be 32 hex chars");
    DedupKey k;
    k.hi = std::stoull(s.substr(0, 16), nullptr, 16);
    k.lo = std::stoull(s.substr(16, 16), nullptr, 16);
    return k;
}

} // namespace pgnav
