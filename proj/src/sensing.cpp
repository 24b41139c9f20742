#include "pgnav/sensing.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pgnav {

double world_bearing(double dx, double dy) {
    if (dx == 0.0 && dy == 0.0) return 0.0;
    return norm360(std::atan2(-dx, dy) * (180.0 / M_PI));
}

int bev_sector(double bearing_deg, double heading_deg) {
    const double h = norm360(heading_deg);
    const double r = std::fmod(h, 30.0); // exact
    const int m = static_cast<int>(std::lround((h - r) / 30.0)); // 0..11
    const double rel = norm360(bearing_deg - r);
    int base = static_cast<int>(rel / 30.0);
    if (base > 11) base = 11;
    return ((base - m) % kBevSectorCount + kBevSectorCount) % kBevSectorCount;
}

FpvDescriptor sense_fpv(const GridWorkspace& w, const Pose& p) {
    FpvDescriptor out;
    const int steps = static_cast<int>(kFpvMaxDepth / kCollisionSampleStep); // 100
    for (int r = 0; r < kFpvRayCount; ++r) {
        const double bearing = p.heading - kFpvFovDeg / 2.0 +
                               r * (kFpvFovDeg / (kFpvRayCount - 1));
        double dx, dy;
        heading_dir(bearing, dx, dy);
        double depth = kFpvMaxDepth;
        std::uint8_t hue = 0;
        for (int k = 1; k <= steps; ++k) {
            const double t = kCollisionSampleStep * k;
            const double x = p.x + dx * t;
            const double y = p.y + dy * t;
            if (!w.in_bounds(x, y)) break; // exits bounds: depth 5.0, hue 0
            if (w.occupied_cell(w.cell_x(x), w.cell_y(y))) {
                depth = t;
                hue = w.hue_cell(w.cell_x(x), w.cell_y(y));
                break;
            }
        }
        out.depth[static_cast<std::size_t>(r)] = depth;
        out.hue[static_cast<std::size_t>(r)] = hue;
    }
    return out;
}

LocalMapDescriptor sense_bev(const GridWorkspace& w, const Pose& p) {
    LocalMapDescriptor d;
    std::array<std::uint32_t, kBevSectorCount> cells_in_sector{};
    std::array<std::uint32_t, kBevSectorCount> occupied_in_sector{};

    const int cx_lo = std::max(0, w.cell_x(std::max(0.0, p.x - kBevRadius)));
    const int cx_hi = std::min(w.width_cells() - 1,
                               static_cast<int>((p.x + kBevRadius) / kCellResolution));
    const int cy_lo = std::max(0, w.cell_y(std::max(0.0, p.y - kBevRadius)));
    const int cy_hi = std::min(w.height_cells() - 1,
                               static_cast<int>((p.y + kBevRadius) / kCellResolution));
    const double r2 = kBevRadius * kBevRadius;

    for (int cy = cy_lo; cy <= cy_hi; ++cy) {
        for (int cx = cx_lo; cx <= cx_hi; ++cx) {
            const double dx = w.cell_center_x(cx) - p.x;
            const double dy = w.cell_center_y(cy) - p.y;
            if (dx * dx + dy * dy > r2) continue;
            const int s = bev_sector(world_bearing(dx, dy), p.heading);
            ++cells_in_sector[static_cast<std::size_t>(s)];
            if (w.occupied_cell(cx, cy)) {
                ++occupied_in_sector[static_cast<std::size_t>(s)];
            } else {
                const int bin = w.hue_cell(cx, cy) >> 4; // hue*16/256
                ++d.sector_hue_hist[static_cast<std::size_t>(s)][static_cast<std::size_t>(bin)];
            }
        }
    }
    for (int s = 0; s < kBevSectorCount; ++s) {
        const auto si = static_cast<std::size_t>(s);
        d.sector_occupancy[si] = cells_in_sector[si] == 0
                                     ? 0.0
                                     : static_cast<double>(occupied_in_sector[si]) /
                                           static_cast<double>(cells_in_sector[si]);
    }
    return d;
}

LocalMapDescriptor cyclic_shift(const LocalMapDescriptor& d, int k) {
    LocalMapDescriptor out;
    const int kk = ((k % kBevSectorCount) + kBevSectorCount) % kBevSectorCount;
    for (int j = 0; j < kBevSectorCount; ++j) {
        const auto src = static_cast<std::size_t>((j + kk) % kBevSectorCount);
        out.sector_hue_hist[static_cast<std::size_t>(j)] = d.sector_hue_hist[src];
        out.sector_occupancy[static_cast<std::size_t>(j)] = d.sector_occupancy[src];
    }
    return out;
}

std::string render_bev_raster(const GridWorkspace& w, const Pose& p) {
    const int radius_cells = static_cast<int>(kBevRadius / kCellResolution); // 25
    const int side = 2 * radius_cells + 1;                                   // 51
    const int ccx = w.cell_x(p.x);
    const int ccy = w.cell_y(p.y);
    const double r2 = kBevRadius * kBevRadius;

    std::ostringstream os;
    for (int row = 0; row < side; ++row) {
        const int cy = ccy + radius_cells - row; // top row = maximum y
        for (int col = 0; col < side; ++col) {
            const int cx = ccx - radius_cells + col;
            char ch = ' ';
            if (cx >= 0 && cy >= 0 && cx < w.width_cells() && cy < w.height_cells()) {
                const double dx = w.cell_center_x(cx) - p.x;
                const double dy = w.cell_center_y(cy) - p.y;
                if (dx * dx + dy * dy <= r2) {
                    if (cx == ccx && cy == ccy) ch = '@';
                    else ch = w.occupied_cell(cx, cy) ? '#' : '.';
                }
            }
            os << ch;
        }
        os << '\n';
    }
    os << '\n';
    for (int row = 0; row < side; ++row) {
        const int cy = ccy + radius_cells - row;
        for (int col = 0; col < side; ++col) {
            const int cx = ccx - radius_cells + col;
            bool inside = false;
            if (cx >= 0 && cy >= 0 && cx < w.width_cells() && cy < w.height_cells()) {
                const double dx = w.cell_center_x(cx) - p.x;
                const double dy = w.cell_center_y(cy) - p.y;
                inside = dx * dx + dy * dy <= r2;
            }
            if (inside) {
                char buf[3];
                std::snprintf(buf, sizeof buf, "%02x", w.hue_cell(cx, cy));
                os << buf;
            } else {
                os << "--";
            }
        }
        os << '\n';
    }
    return os.str();
}

} // namespace pgnav
