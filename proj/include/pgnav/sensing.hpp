#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pgnav/workspace.hpp"

namespace pgnav {

inline constexpr int kFpvRayCount = 32;
inline constexpr double kFpvFovDeg = 90.0;
inline constexpr double kFpvMaxDepth = 5.0;

inline constexpr int kBevSectorCount = 12;
inline constexpr int kHueBinCount = 16;
inline constexpr double kBevRadius = 2.5;

// Synthetic first-person observation: 32 (depth, hue) rays over a 90 deg
// horizontal field of view centered on the heading.
struct FpvDescriptor {
    std::array<double, kFpvRayCount> depth{};     // meters, clamped to [0, 5]
    std::array<std::uint8_t, kFpvRayCount> hue{}; // hue of the hit cell, 0 on miss
};

// Sectorized hue/occupancy summary of the circular 2.5 m BEV local map.
// Sector k covers polar angles [k*30, (k+1)*30) in the sensor frame.
struct LocalMapDescriptor {
    std::array<std::array<std::uint32_t, kHueBinCount>, kBevSectorCount> sector_hue_hist{};
    std::array<double, kBevSectorCount> sector_occupancy{};

    bool operator==(const LocalMapDescriptor&) const = default;

    std::uint64_t total_hue_count() const {
        std::uint64_t n = 0;
        for (const auto& h : sector_hue_hist)
            for (std::uint32_t c : h) n += c;
        return n;
    }
};

// Sector index of a world bearing seen from a given heading. The heading is
// decomposed as 30*m + r with r = fmod(heading, 30), which is exact in IEEE
// arithmetic; offsetting the heading by an exactly-representable multiple of
// 30 degrees therefore shifts the result by exactly that many sectors.
int bev_sector(double bearing_deg, double heading_deg);

// World bearing of (dx, dy) under the 0 deg = +y, counterclockwise-positive
// convention, normalized to [0, 360).
double world_bearing(double dx, double dy);

FpvDescriptor sense_fpv(const GridWorkspace& w, const Pose& p);
LocalMapDescriptor sense_bev(const GridWorkspace& w, const Pose& p);

// Output sector j takes input sector (j + k) mod 12.
LocalMapDescriptor cyclic_shift(const LocalMapDescriptor& d, int k);

// 51x51 world-aligned raster of the local disk, for inspection only:
// '@' robot, '#' obstacle, '.' free, ' ' outside disk or bounds, followed by
// a hue grid in hex ('--' outside).
std::string render_bev_raster(const GridWorkspace& w, const Pose& p);

} // namespace pgnav
