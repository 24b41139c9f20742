#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "pgnav/sensing.hpp"

namespace pgnav {

// Shannon entropy in bits of a 16-bin count histogram; empty histograms have
// entropy 0 and zero bins contribute 0.
double hue_entropy(const std::array<std::uint32_t, kHueBinCount>& counts);

struct CanonicalLmd {
    LocalMapDescriptor descriptor;
    int shift = 0;      // k* in [0, 12)
    double entropy = 0; // bits, over the forward half-disk at k*
};

// Rotate the descriptor so the 6-sector forward half with minimum hue
// entropy faces sector 0. Candidate shifts are the 12 sector rotations.
// Entropy ties resolve to the lexicographically smallest shifted descriptor
// (then the smallest shift), so the result is exactly rotation invariant and
// idempotent even on symmetric scenes.
CanonicalLmd canonicalize(const LocalMapDescriptor& d);

// 128-bit content key of a canonical descriptor, quantized for noise
// robustness: normalized sector histograms to 1/32 steps, occupancy to 1/16
// steps. Stable across serialization round trips.
struct DedupKey {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    bool operator==(const DedupKey&) const = default;
    bool operator<(const DedupKey& o) const {
        return hi != o.hi ? hi < o.hi : lo < o.lo;
    }
    std::string to_hex() const;
    static DedupKey from_hex(const std::string& s);
};

DedupKey dedup_key(const CanonicalLmd& c);

struct DedupKeyHash {
    std::size_t operator()(const DedupKey& k) const {
        return static_cast<std::size_t>(k.hi ^ (k.lo * 0x9e3779b97f4a7c15ULL));
    }
};

} // namespace pgnav
