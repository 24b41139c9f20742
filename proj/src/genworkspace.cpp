#include "pgnav/genworkspace.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <vector>

#include "pgnav/rng.hpp"

namespace pgnav {

namespace {

struct RoomRect {
    int left, right, bottom, top; // inclusive cell bounds
};

constexpr int kBaseBins[] = {1, 4, 7, 10, 13};
constexpr int kAccentBins[] = {3, 6, 9, 12, 15};
constexpr int kCorridorBin = 0;
constexpr int kNoise[] = {-8, -4, 0, 4, 8};

int noisy_hue(int bin, Rng& rng) {
    const int base = bin * 16 + 8;
    const int hue = base + kNoise[rng.below(5)];
    return std::clamp(hue, 0, 255);
}

int wall_hue(int room, int cx, int cy) {
    // Plain checker of base and accent runs; gives the first-person view an
    // angular texture without touching occupancy.
    const int bin = ((cx / 4 + cy / 4) % 2 == 0) ? kBaseBins[room] : kAccentBins[room];
    return bin * 16 + 8;
}

} // namespace

GridWorkspace generate_workspace(const GenParams& params) {
    if (params.width_m < 3.0 || params.height_m < 3.0)
        throw std::invalid_argument("generate_workspace: dimensions must be >= 3 m x 3 m");
    if (params.rooms < 2 || params.rooms > 4)
        throw std::invalid_argument("generate_workspace: rooms must be in [2, 4]");
    if (params.corridor_width_m < 0.5)
        throw std::invalid_argument("generate_workspace: corridors must be >= 0.5 m wide");

    Rng rng(params.seed);
    const int W = static_cast<int>(params.width_m / kCellResolution + 0.5);
    const int H = static_cast<int>(params.height_m / kCellResolution + 0.5);
    const int corridor_w = static_cast<int>(params.corridor_width_m / kCellResolution + 0.5);

    std::vector<std::uint8_t> occ(static_cast<std::size_t>(W) * H, 1);
    std::vector<std::uint8_t> hue(static_cast<std::size_t>(W) * H, 0);
    std::vector<int> region(static_cast<std::size_t>(W) * H, -1); // room id or rooms=corridor
    auto at = [&](int cx, int cy) { return static_cast<std::size_t>(cy) * W + cx; };

    // Rooms occupy vertical slabs with randomized margins.
    const int slab = W / params.rooms;
    std::vector<RoomRect> rooms;
    for (int r = 0; r < params.rooms; ++r) {
        const int sl = r * slab;
        const int sr = (r + 1 == params.rooms) ? W - 1 : (r + 1) * slab - 1;
        RoomRect room;
        room.left = sl + 2 + rng.uniform_int(0, 2);
        room.right = sr - 2 - rng.uniform_int(0, 2);
        room.bottom = 2 + rng.uniform_int(0, 3);
        room.top = H - 3 - rng.uniform_int(0, 3);
        if (room.right - room.left < 8 || room.top - room.bottom < 8)
            throw std::invalid_argument("generate_workspace: rooms do not fit");
        rooms.push_back(room);
    }

    const int accent_cells = 4; // 0.4 m accent stripe along the east wall
    for (int r = 0; r < params.rooms; ++r) {
        const RoomRect& room = rooms[static_cast<std::size_t>(r)];
        for (int cy = room.bottom; cy <= room.top; ++cy) {
            for (int cx = room.left; cx <= room.right; ++cx) {
                occ[at(cx, cy)] = 0;
                region[at(cx, cy)] = r;
                const bool accent = cx > room.right - accent_cells;
                hue[at(cx, cy)] = static_cast<std::uint8_t>(
                    noisy_hue(accent ? kAccentBins[r] : kBaseBins[r], rng));
            }
        }
    }

    // Chain the rooms with horizontal corridors through the slab walls.
    for (int r = 0; r + 1 < params.rooms; ++r) {
        const RoomRect& a = rooms[static_cast<std::size_t>(r)];
        const RoomRect& b = rooms[static_cast<std::size_t>(r + 1)];
        const int lo = std::max(a.bottom, b.bottom);
        const int hi = std::min(a.top, b.top) - corridor_w + 1;
        if (hi < lo)
            throw std::invalid_argument("generate_workspace: rooms do not overlap vertically");
        const int cy0 = rng.uniform_int(lo, hi);
        for (int cy = cy0; cy < cy0 + corridor_w; ++cy) {
            for (int cx = a.right + 1; cx < b.left; ++cx) {
                if (occ[at(cx, cy)] == 0) continue;
                occ[at(cx, cy)] = 0;
                region[at(cx, cy)] = params.rooms;
                hue[at(cx, cy)] = static_cast<std::uint8_t>(noisy_hue(kCorridorBin, rng));
            }
        }
    }

    // Recolor walls with the palette of the nearest free region so the
    // first-person view distinguishes rooms.
    {
        std::queue<std::pair<int, int>> frontier;
        std::vector<int> wall_region(static_cast<std::size_t>(W) * H, -1);
        for (int cy = 0; cy < H; ++cy)
            for (int cx = 0; cx < W; ++cx)
                if (occ[at(cx, cy)] == 0) {
                    wall_region[at(cx, cy)] = region[at(cx, cy)];
                    frontier.push({cx, cy});
                }
        const int dx[] = {1, -1, 0, 0};
        const int dy[] = {0, 0, 1, -1};
        while (!frontier.empty()) {
            const auto [cx, cy] = frontier.front();
            frontier.pop();
            for (int n = 0; n < 4; ++n) {
                const int nx = cx + dx[n];
                const int ny = cy + dy[n];
                if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
                if (wall_region[at(nx, ny)] >= 0) continue;
                wall_region[at(nx, ny)] = wall_region[at(cx, cy)];
                frontier.push({nx, ny});
            }
        }
        for (int cy = 0; cy < H; ++cy)
            for (int cx = 0; cx < W; ++cx)
                if (occ[at(cx, cy)] == 1) {
                    const int r = wall_region[at(cx, cy)];
                    const int room = (r >= 0 && r < params.rooms) ? r : 0;
                    hue[at(cx, cy)] = static_cast<std::uint8_t>(wall_hue(room, cx, cy));
                }
    }

    // The free space must form a single connected component.
    {
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(W) * H, 0);
        std::queue<std::pair<int, int>> frontier;
        std::size_t free_total = 0, visited = 0;
        for (int cy = 0; cy < H && frontier.empty(); ++cy)
            for (int cx = 0; cx < W && frontier.empty(); ++cx)
                if (occ[at(cx, cy)] == 0) {
                    frontier.push({cx, cy});
                    seen[at(cx, cy)] = 1;
                }
        for (std::uint8_t o : occ)
            if (o == 0) ++free_total;
        const int dx[] = {1, -1, 0, 0};
        const int dy[] = {0, 0, 1, -1};
        while (!frontier.empty()) {
            const auto [cx, cy] = frontier.front();
            frontier.pop();
            ++visited;
            for (int n = 0; n < 4; ++n) {
                const int nx = cx + dx[n];
                const int ny = cy + dy[n];
                if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
                if (occ[at(nx, ny)] != 0 || seen[at(nx, ny)]) continue;
                seen[at(nx, ny)] = 1;
                frontier.push({nx, ny});
            }
        }
        if (visited != free_total)
            throw std::runtime_error("generate_workspace: free space is not connected");
    }

    return GridWorkspace(W, H, std::move(occ), std::move(hue));
}

} // namespace pgnav
