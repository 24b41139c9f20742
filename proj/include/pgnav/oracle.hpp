#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "pgnav/workspace.hpp"

namespace pgnav {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

enum class GridConnectivity { four, eight };

// Training-time-only geodesic cost-to-goal field over free cells.
// Immutable after construction; all queries are pure.
class CostField {
public:
    CostField(const GridWorkspace& w, Pose goal,
              GridConnectivity conn = GridConnectivity::eight);

    double cost_cell(int cx, int cy) const {
        return costs_[static_cast<std::size_t>(cy) * static_cast<std::size_t>(width_) +
                      static_cast<std::size_t>(cx)];
    }
    // Cost of the cell containing a continuous position.
    double cost_at(double x, double y) const;

    const Pose& goal() const { return goal_; }
    const std::vector<double>& costs() const { return costs_; }

private:
    int width_;
    int height_;
    Pose goal_;
    std::vector<double> costs_;
};

inline CostField build_cost_field(const GridWorkspace& w, const Pose& goal,
                                  GridConnectivity conn = GridConnectivity::eight) {
    return CostField(w, goal, conn);
}

// R = cost(start cell) - cost(end cell); nullopt when either end is
// unreachable (the episode is then discarded from training).
std::optional<double> episode_reward(const CostField& cf, const Pose& start, const Pose& end);

// The safe fixed-angle action whose resulting cell minimizes the cost field.
// Ties by smallest |angle|, then positive before negative. Never the random
// turn. nullopt when no fixed action is safe.
std::optional<int> best_action(const GridWorkspace& w, const CostField& cf, const Pose& p);

} // namespace pgnav
