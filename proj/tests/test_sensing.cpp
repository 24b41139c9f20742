#include <doctest.h>

#include "pgnav/sensing.hpp"
#include "test_util.hpp"

using namespace pgnav;
using testutil::make_workspace;
using testutil::uniform_free;

TEST_CASE("sense_fpv reports max depth and hue 0 with nothing in view") {
    const GridWorkspace w = uniform_free(120, 120); // nothing within 5 m of center
    const FpvDescriptor d = sense_fpv(w, Pose{6.0, 6.0, 0.0});
    for (int r = 0; r < kFpvRayCount; ++r) {
        CHECK(d.depth[static_cast<std::size_t>(r)] == 5.0);
        CHECK(d.hue[static_cast<std::size_t>(r)] == 0);
    }
}

TEST_CASE("sense_fpv sees a perpendicular wall at its distance and hue") {
    // Wall row at y in [7.0, 7.1), hue 200; robot 1.0 m below it.
    const GridWorkspace w = make_workspace(120, 120, [](int, int cy) {
        return std::pair{cy == 70, std::uint8_t{200}};
    });
    const Pose p{6.0, 6.0, 0.0};
    const FpvDescriptor d = sense_fpv(w, p);
    // Center rays hit nearly head-on.
    for (int r = 15; r <= 16; ++r) {
        CHECK(d.depth[static_cast<std::size_t>(r)] ==
              doctest::Approx(1.0).epsilon(0.055));
        CHECK(d.hue[static_cast<std::size_t>(r)] == 200);
    }
    // Facing away, the wall is far outside the 5 m range.
    const FpvDescriptor away = sense_fpv(w, Pose{6.0, 6.0, 180.0});
    for (int r = 0; r < kFpvRayCount; ++r) {
        CHECK(away.depth[static_cast<std::size_t>(r)] == 5.0);
        CHECK(away.hue[static_cast<std::size_t>(r)] == 0);
    }
}

TEST_CASE("sense_fpv is deterministic") {
    const GridWorkspace w = make_workspace(80, 80, [](int cx, int cy) {
        return std::pair{(cx * 13 + cy * 7) % 11 == 0, static_cast<std::uint8_t>(cx % 256)};
    });
    const Pose p{3.35, 4.15, 77.0};
    const FpvDescriptor a = sense_fpv(w, p);
    const FpvDescriptor b = sense_fpv(w, p);
    CHECK(a.depth == b.depth);
    CHECK(a.hue == b.hue);
}

TEST_CASE("sense_bev on a uniform free map puts all mass in one bin") {
    const GridWorkspace w = uniform_free(120, 120, 40);
    const LocalMapDescriptor d = sense_bev(w, Pose{6.0, 6.0, 0.0});
    for (int s = 0; s < kBevSectorCount; ++s) {
        const auto& hist = d.sector_hue_hist[static_cast<std::size_t>(s)];
        CHECK(d.sector_occupancy[static_cast<std::size_t>(s)] == 0.0);
        for (int b = 0; b < kHueBinCount; ++b) {
            if (b == 40 >> 4) CHECK(hist[static_cast<std::size_t>(b)] > 0);
            else CHECK(hist[static_cast<std::size_t>(b)] == 0);
        }
    }
}

TEST_CASE("sense_bev occupancy saturates inside a solid block") {
    const GridWorkspace w = make_workspace(120, 120, [](int cx, int cy) {
        return std::pair{!(cx == 60 && cy == 60), std::uint8_t{0}};
    });
    const LocalMapDescriptor d = sense_bev(w, Pose{6.05, 6.05, 0.0});
    for (int s = 0; s < kBevSectorCount; ++s)
        CHECK(d.sector_occupancy[static_cast<std::size_t>(s)] >= 0.98);
}

TEST_CASE("sense_bev heading offsets of 30 degrees shift sectors exactly") {
    Rng rng(21);
    const GridWorkspace w = make_workspace(100, 70, [&](int, int) {
        return std::pair{rng.unit() < 0.25, static_cast<std::uint8_t>(rng.below(256))};
    });
    int tested = 0;
    while (tested < 300) {
        const Pose p{rng.uniform(0.3, 9.7), rng.uniform(0.3, 6.7),
                     static_cast<double>(rng.uniform_int(0, 359))};
        if (!pose_valid(w, p)) continue;
        const int k = rng.uniform_int(0, 11);
        const LocalMapDescriptor base = sense_bev(w, p);
        const LocalMapDescriptor rotated =
            sense_bev(w, Pose{p.x, p.y, norm360(p.heading + 30.0 * k)});
        CHECK(rotated == cyclic_shift(base, k));
        CHECK(rotated.total_hue_count() == base.total_hue_count());
        ++tested;
    }
}

TEST_CASE("total histogram count equals free cells inside the disk") {
    Rng rng(4);
    const GridWorkspace w = make_workspace(90, 90, [&](int, int) {
        return std::pair{rng.unit() < 0.3, static_cast<std::uint8_t>(rng.below(256))};
    });
    const Pose p{4.55, 4.35, 123.0};
    REQUIRE(pose_valid(w, p));
    const LocalMapDescriptor d = sense_bev(w, p);

    std::uint64_t free_in_disk = 0;
    for (int cy = 0; cy < w.height_cells(); ++cy)
        for (int cx = 0; cx < w.width_cells(); ++cx) {
            const double dx = w.cell_center_x(cx) - p.x;
            const double dy = w.cell_center_y(cy) - p.y;
            if (dx * dx + dy * dy <= kBevRadius * kBevRadius && !w.occupied_cell(cx, cy))
                ++free_in_disk;
        }
    CHECK(d.total_hue_count() == free_in_disk);
}

TEST_CASE("bev raster dump has the expected frame") {
    const GridWorkspace w = uniform_free(120, 120, 65);
    const std::string raster = render_bev_raster(w, Pose{6.0, 6.0, 0.0});
    CHECK(raster.find('@') != std::string::npos);
    CHECK(raster.find("41") != std::string::npos); // hue 65 = 0x41
    // 51 char rows + blank + 51 hex rows.
    int lines = 0;
    for (char c : raster)
        if (c == '\n') ++lines;
    CHECK(lines == 103);
}
