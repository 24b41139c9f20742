#pragma once

#include <cstdint>

#include "pgnav/workspace.hpp"

namespace pgnav {

struct GenParams {
    double width_m = 10.0;
    double height_m = 5.0;
    int rooms = 3;              // laid out as vertical slabs, chained by corridors
    double corridor_width_m = 0.9;
    std::uint64_t seed = 0;
};

// Procedural rooms-and-corridors workspace: one connected free component,
// per-room hue palettes with per-cell noise within +/-8 hue units, a floor
// accent stripe per room (breaks rotational symmetry so canonicalization has
// something to lock onto), and recolored wall runs facing each room.
// Deterministic: a fixed seed yields a byte-identical .wsp file.
GridWorkspace generate_workspace(const GenParams& params);

} // namespace pgnav
