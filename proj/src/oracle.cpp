#include "pgnav/oracle.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace pgnav {

namespace {

struct QueueEntry {
    double cost;
    int index;
    bool operator>(const QueueEntry& o) const {
        if (cost != o.cost) return cost > o.cost;
        return index > o.index;
    }
};

} // namespace

CostField::CostField(const GridWorkspace& w, Pose goal, GridConnectivity conn)
    : width_(w.width_cells()), height_(w.height_cells()), goal_(goal),
      costs_(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_),
             kInfiniteCost) {
    if (!w.in_bounds(goal.x, goal.y) || w.occupied_at(goal.x, goal.y))
        throw std::runtime_error("goal must lie on a free cell");

    const double axis_w = kCellResolution;
    const double diag_w = kCellResolution * std::sqrt(2.0);
    const int gx = w.cell_x(goal.x);
    const int gy = w.cell_y(goal.y);

    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> pq;
    const int goal_idx = w.cell_index(gx, gy);
    costs_[static_cast<std::size_t>(goal_idx)] = 0.0;
    pq.push({0.0, goal_idx});

    const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    const int neighbor_count = (conn == GridConnectivity::eight) ? 8 : 4;

    while (!pq.empty()) {
        const auto [cost, idx] = pq.top();
        pq.pop();
        if (cost > costs_[static_cast<std::size_t>(idx)]) continue;
        const int cx = idx % width_;
        const int cy = idx / width_;
        for (int n = 0; n < neighbor_count; ++n) {
            const int nx = cx + dx8[n];
            const int ny = cy + dy8[n];
            if (nx < 0 || ny < 0 || nx >= width_ || ny >= height_) continue;
            if (w.occupied_cell(nx, ny)) continue;
            const double step = (n < 4) ? axis_w : diag_w;
            const double next = cost + step;
            const std::size_t nidx = static_cast<std::size_t>(w.cell_index(nx, ny));
            if (next < costs_[nidx]) {
                costs_[nidx] = next;
                pq.push({next, static_cast<int>(nidx)});
            }
        }
    }
}

double CostField::cost_at(double x, double y) const {
    const int cx = static_cast<int>(x / kCellResolution);
    const int cy = static_cast<int>(y / kCellResolution);
    if (cx < 0 || cy < 0 || cx >= width_ || cy >= height_) return kInfiniteCost;
    return cost_cell(cx, cy);
}

std::optional<double> episode_reward(const CostField& cf, const Pose& start, const Pose& end) {
    const double cs = cf.cost_at(start.x, start.y);
    const double ce = cf.cost_at(end.x, end.y);
    if (!std::isfinite(cs) || !std::isfinite(ce)) return std::nullopt;
    return cs - ce;
}

std::optional<int> best_action(const GridWorkspace& w, const CostField& cf, const Pose& p) {
    Rng unused(0); // fixed actions never consume randomness
    std::optional<int> best;
    double best_cost = kInfiniteCost;
    int best_abs = 0, best_angle = 0;
    for (int idx = 1; idx < kActionCount; ++idx) {
        const Action a = action_from_index(idx);
        auto out = apply_action(w, p, a, unused);
        if (!out) continue;
        const double c = cf.cost_at(out->pose.x, out->pose.y);
        const int abs_angle = std::abs(a.angle);
        const bool better =
            !best || c < best_cost ||
            (c == best_cost &&
             (abs_angle < best_abs || (abs_angle == best_abs && a.angle > best_angle)));
        if (better) {
            best = idx;
            best_cost = c;
            best_abs = abs_angle;
            best_angle = a.angle;
        }
    }
    return best;
}

} // namespace pgnav
