#include "pgnav/workspace.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pgnav {

GridWorkspace::GridWorkspace(int width_cells, int height_cells,
                             std::vector<std::uint8_t> occupancy,
                             std::vector<std::uint8_t> hue)
    : width_(width_cells), height_(height_cells),
      occupancy_(std::move(occupancy)), hue_(std::move(hue)) {
    if (width_ <= 0 || height_ <= 0)
        throw std::runtime_error("workspace dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    if (occupancy_.size() != n || hue_.size() != n)
        throw std::runtime_error("occupancy/hue arrays must have width*height entries");
    for (int cy = 0; cy < height_; ++cy)
        for (int cx = 0; cx < width_; ++cx)
            if (occupancy_[static_cast<std::size_t>(cell_index(cx, cy))] == 0)
                free_cells_.push_back({cx, cy});
    if (free_cells_.empty())
        throw std::runtime_error("workspace has no free cell");
}

Action action_from_index(int index) {
    if (index < 0 || index >= kActionCount)
        throw std::out_of_range("action index out of range");
    if (index == 0) return Action{TurnKind::random_turn, 0};
    return Action{TurnKind::fixed_turn, kFixedAngles[static_cast<std::size_t>(index - 1)]};
}

int action_to_index(const Action& a) {
    if (a.kind == TurnKind::random_turn) return 0;
    return fixed_action_index(a.angle);
}

int fixed_action_index(int angle) {
    for (std::size_t i = 0; i < kFixedAngles.size(); ++i)
        if (kFixedAngles[i] == angle) return static_cast<int>(i) + 1;
    throw std::out_of_range("not a fixed action angle");
}

namespace {

// Swept-segment collision test at 0.05 m sampling (11 samples over 0.5 m).
bool motion_free(const GridWorkspace& w, double x, double y, double heading) {
    double dx, dy;
    heading_dir(heading, dx, dy);
    const int n = static_cast<int>(kStepDistance / kCollisionSampleStep); // 10
    for (int k = 0; k <= n; ++k) {
        const double t = kCollisionSampleStep * k;
        if (w.occupied_at(x + dx * t, y + dy * t)) return false;
    }
    return true;
}

Pose advance(const Pose& p, double heading) {
    double dx, dy;
    heading_dir(heading, dx, dy);
    return Pose{p.x + dx * kStepDistance, p.y + dy * kStepDistance, heading};
}

int draw_random_angle(Rng& rng) { return rng.uniform_int(-179, 180); }

} // namespace

std::optional<StepOutcome> apply_action(const GridWorkspace& w, const Pose& p,
                                        const Action& a, Rng& rng) {
    const int angle = (a.kind == TurnKind::random_turn) ? draw_random_angle(rng) : a.angle;
    const double heading = norm360(p.heading + angle);
    if (!motion_free(w, p.x, p.y, heading)) return std::nullopt;
    return StepOutcome{advance(p, heading), angle};
}

std::vector<int> safe_actions(const GridWorkspace& w, const Pose& p) {
    std::vector<int> out;
    out.reserve(kActionCount);
    bool any_fixed = false;
    std::array<bool, 12> fixed_safe{};
    for (std::size_t i = 0; i < kFixedAngles.size(); ++i) {
        const double heading = norm360(p.heading + kFixedAngles[i]);
        fixed_safe[i] = motion_free(w, p.x, p.y, heading);
        any_fixed = any_fixed || fixed_safe[i];
    }
    if (any_fixed) out.push_back(0);
    for (std::size_t i = 0; i < fixed_safe.size(); ++i)
        if (fixed_safe[i]) out.push_back(static_cast<int>(i) + 1);
    return out;
}

bool goal_reached(const Pose& p, const Pose& goal) {
    const double dx = p.x - goal.x;
    const double dy = p.y - goal.y;
    return std::sqrt(dx * dx + dy * dy) <= kGoalRadius;
}

std::optional<EpisodeStep> step_with_bumper(const GridWorkspace& w, const Pose& p,
                                            int action_index, Rng& rng) {
    const Action a = action_from_index(action_index);
    if (a.kind == TurnKind::fixed_turn) {
        auto out = apply_action(w, p, a, rng);
        if (!out) return std::nullopt;
        return EpisodeStep{p, action_index, out->realized_angle, out->pose};
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto out = apply_action(w, p, a, rng);
        if (out) return EpisodeStep{p, action_index, out->realized_angle, out->pose};
    }
    // Fall back to a uniformly chosen safe fixed angle.
    std::vector<int> safe_fixed;
    for (std::size_t i = 0; i < kFixedAngles.size(); ++i) {
        if (motion_free(w, p.x, p.y, norm360(p.heading + kFixedAngles[i])))
            safe_fixed.push_back(kFixedAngles[i]);
    }
    if (safe_fixed.empty()) return std::nullopt;
    const int angle = safe_fixed[static_cast<std::size_t>(rng.below(safe_fixed.size()))];
    return EpisodeStep{p, action_index, angle, advance(p, norm360(p.heading + angle))};
}

namespace {

struct PaletteEntry {
    std::uint8_t occ;
    std::uint8_t hue;
};

} // namespace

GridWorkspace load_workspace(std::istream& in) {
    int width = -1, height = -1;
    bool resolution_seen = false;
    std::map<char, PaletteEntry> palette;
    std::string line;
    bool map_started = false;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "width") {
            if (!(ls >> width) || width <= 0) throw std::runtime_error("bad width line");
        } else if (key == "height") {
            if (!(ls >> height) || height <= 0) throw std::runtime_error("bad height line");
        } else if (key == "resolution") {
            double res = 0.0;
            if (!(ls >> res)) throw std::runtime_error("bad resolution line");
            if (res != kCellResolution)
                throw std::runtime_error("workspace resolution must be 0.1 m");
            resolution_seen = true;
        } else if (key == "cell") {
            std::string ch;
            int occ = 0, hue = 0;
            if (!(ls >> ch >> occ >> hue) || ch.size() != 1)
                throw std::runtime_error("bad cell palette line");
            if (occ != 0 && occ != 1) throw std::runtime_error("cell occupancy must be 0 or 1");
            if (hue < 0 || hue > 255) throw std::runtime_error("cell hue must be in [0,255]");
            palette[ch[0]] = PaletteEntry{static_cast<std::uint8_t>(occ),
                                          static_cast<std::uint8_t>(hue)};
        } else if (key == "map:") {
            map_started = true;
            break;
        } else {
            throw std::runtime_error("unknown header line: " + key);
        }
    }

    if (!map_started) throw std::runtime_error("missing map: section");
    if (width <= 0 || height <= 0) throw std::runtime_error("missing width/height");
    if (!resolution_seen) throw std::runtime_error("missing resolution line");

    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<std::uint8_t> occ(n, 1);
    std::vector<std::uint8_t> hue(n, 0);

    // Row 0 of the file is the maximum-y row.
    for (int row = 0; row < height; ++row) {
        if (!std::getline(in, line)) throw std::runtime_error("map has too few rows");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (static_cast<int>(line.size()) != width)
            throw std::runtime_error("map row has wrong width");
        const int cy = height - 1 - row;
        for (int cx = 0; cx < width; ++cx) {
            auto it = palette.find(line[static_cast<std::size_t>(cx)]);
            if (it == palette.end())
                throw std::runtime_error(std::string("unknown map character '") +
                                         line[static_cast<std::size_t>(cx)] + "'");
            const std::size_t idx = static_cast<std::size_t>(cy) * width + cx;
            occ[idx] = it->second.occ;
            hue[idx] = it->second.hue;
        }
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty())
            throw std::runtime_error("map has too many rows");
    }

    return GridWorkspace(width, height, std::move(occ), std::move(hue));
}

GridWorkspace load_workspace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open workspace file: " + path);
    return load_workspace(in);
}

void write_workspace(const GridWorkspace& w, std::ostream& out) {
    // Assign one palette character per distinct (occ, hue) pair, in a fixed
    // order so the writer is byte-deterministic.
    std::map<std::pair<int, int>, char> palette;
    const std::string chars =
        "!\"$%&'()*+,-./0123456789:;<=>?@ABCDEFGHIJKLMNOPQRSTUVWXYZ"
        "[\\]^_`abcdefghijklmnopqrstuvwxyz{|}~";
    for (int cy = 0; cy < w.height_cells(); ++cy) {
        for (int cx = 0; cx < w.width_cells(); ++cx) {
            const std::pair<int, int> key{w.occupied_cell(cx, cy) ? 1 : 0, w.hue_cell(cx, cy)};
            if (!palette.count(key)) {
                if (palette.size() >= chars.size())
                    throw std::runtime_error("workspace has too many distinct cell kinds");
                palette[key] = chars[palette.size()];
            }
        }
    }
    out << "width " << w.width_cells() << "\n";
    out << "height " << w.height_cells() << "\n";
    out << "resolution 0.1\n";
    for (const auto& [key, ch] : palette)
        out << "cell " << ch << ' ' << key.first << ' ' << key.second << "\n";
    out << "map:\n";
    for (int row = 0; row < w.height_cells(); ++row) {
        const int cy = w.height_cells() - 1 - row;
        for (int cx = 0; cx < w.width_cells(); ++cx) {
            const std::pair<int, int> key{w.occupied_cell(cx, cy) ? 1 : 0, w.hue_cell(cx, cy)};
            out << palette[key];
        }
        out << "\n";
    }
}

void write_workspace_file(const GridWorkspace& w, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_workspace(w, out);
}

} // namespace pgnav
