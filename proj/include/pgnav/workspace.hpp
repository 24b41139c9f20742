#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pgnav/rng.hpp"

namespace pgnav {

inline constexpr double kCellResolution = 0.1;  // meters per cell, fixed
inline constexpr double kStepDistance = 0.5;    // forward motion per action, meters
inline constexpr double kGoalRadius = 0.25;     // meters
inline constexpr double kCollisionSampleStep = 0.05; // meters between swept samples

// Normalize an angle in degrees to [0, 360).
inline double norm360(double deg) {
    double y = std::fmod(deg, 360.0);
    if (y < 0.0) y += 360.0;
    if (y >= 360.0) y = 0.0; // fmod of a tiny negative can round up to 360
    return y;
}

// Heading convention: 0 deg = +y, counterclockwise positive.
inline void heading_dir(double heading_deg, double& dx, double& dy) {
    const double rad = heading_deg * (M_PI / 180.0);
    dx = -std::sin(rad);
    dy = std::cos(rad);
}

// Occupancy + per-cell hue world model at 0.1 m resolution.
// Immutable after load; safe to share between threads.
class GridWorkspace {
public:
    GridWorkspace(int width_cells, int height_cells,
                  std::vector<std::uint8_t> occupancy,
                  std::vector<std::uint8_t> hue);

    int width_cells() const { return width_; }
    int height_cells() const { return height_; }
    double width_m() const { return width_ * kCellResolution; }
    double height_m() const { return height_ * kCellResolution; }

    bool in_bounds(double x, double y) const {
        return x >= 0.0 && y >= 0.0 && x < width_m() && y < height_m();
    }
    int cell_x(double x) const { return static_cast<int>(x / kCellResolution); }
    int cell_y(double y) const { return static_cast<int>(y / kCellResolution); }
    int cell_index(int cx, int cy) const { return cy * width_ + cx; }

    bool occupied_cell(int cx, int cy) const { return occupancy_[cell_index(cx, cy)] != 0; }
    std::uint8_t hue_cell(int cx, int cy) const { return hue_[cell_index(cx, cy)]; }

    // Occupancy at a continuous point; out-of-bounds counts as occupied.
    bool occupied_at(double x, double y) const {
        if (!in_bounds(x, y)) return true;
        return occupied_cell(cell_x(x), cell_y(y));
    }

    double cell_center_x(int cx) const { return (cx + 0.5) * kCellResolution; }
    double cell_center_y(int cy) const { return (cy + 0.5) * kCellResolution; }

    const std::vector<std::uint8_t>& occupancy() const { return occupancy_; }
    const std::vector<std::uint8_t>& hue() const { return hue_; }

    std::size_t free_cell_count() const { return free_cells_.size(); }
    // (cx, cy) of the i-th free cell in row-major order.
    std::pair<int, int> free_cell(std::size_t i) const { return free_cells_[i]; }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> occupancy_;
    std::vector<std::uint8_t> hue_;
    std::vector<std::pair<int, int>> free_cells_;
};

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0; // degrees in [0, 360)
};

inline bool pose_valid(const GridWorkspace& w, const Pose& p) {
    return !w.occupied_at(p.x, p.y);
}

// The 13-action space: index 0 is the random turn, indices 1..12 are the
// fixed angles in ascending signed order.
inline constexpr int kActionCount = 13;
inline constexpr std::array<int, 12> kFixedAngles = {
    -150, -120, -90, -60, -30, 0, 30, 60, 90, 120, 150, 180};

enum class TurnKind { random_turn, fixed_turn };

struct Action {
    TurnKind kind = TurnKind::fixed_turn;
    int angle = 0; // degrees; meaningful only for fixed_turn
};

Action action_from_index(int index);
int action_to_index(const Action& a);
// Index of the fixed action with the given angle (must be a multiple of 30
// in (-180, 180]).
int fixed_action_index(int angle);

struct StepOutcome {
    Pose pose;
    int realized_angle = 0; // degrees; resolved value for the random turn
};

struct EpisodeStep {
    Pose pose_before;
    int action_index = 0;
    int realized_angle = 0;
    Pose pose_after;
};

// Turn by the action's angle, then advance 0.5 m along the new heading.
// Returns nullopt when the swept segment (sampled every 0.05 m) touches an
// obstacle cell or leaves the workspace; motion is never clipped.
std::optional<StepOutcome> apply_action(const GridWorkspace& w, const Pose& p,
                                        const Action& a, Rng& rng);

// Bumper: exactly the fixed-angle actions whose full motion is collision
// free, ascending by index; index 0 (random turn) is present iff at least
// one fixed angle is safe. Empty result means no action is safe.
std::vector<int> safe_actions(const GridWorkspace& w, const Pose& p);

bool goal_reached(const Pose& p, const Pose& goal);

// Execute a bumper-approved action. The random turn redraws its angle until
// the motion is collision free (at most 100 draws), then falls back to a
// uniformly chosen safe fixed angle. Returns nullopt only if the action
// cannot be realized safely.
std::optional<EpisodeStep> step_with_bumper(const GridWorkspace& w, const Pose& p,
                                            int action_index, Rng& rng);

// Workspace text format (.wsp). Throws std::runtime_error on malformed
// input: wrong resolution, unknown map characters, dimension mismatch, or
// a map without free cells.
GridWorkspace load_workspace(std::istream& in);
GridWorkspace load_workspace_file(const std::string& path);
void write_workspace(const GridWorkspace& w, std::ostream& out);
void write_workspace_file(const GridWorkspace& w, const std::string& path);

} // namespace pgnav
