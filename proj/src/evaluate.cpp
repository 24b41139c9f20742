#include "pgnav/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "pgnav/canonical.hpp"

namespace pgnav {

Planner make_random_planner() {
    return [](const GridWorkspace&, const Pose&, const std::vector<int>& safe, Rng& rng) {
        return safe[static_cast<std::size_t>(rng.below(safe.size()))];
    };
}

namespace {

// Exact byte key of an FPV descriptor; depths are multiples of 0.05 so the
// representation is stable.
std::string fpv_byte_key(const FpvDescriptor& d) {
    std::string key(sizeof d.depth + sizeof d.hue, '\0');
    std::memcpy(key.data(), d.depth.data(), sizeof d.depth);
    std::memcpy(key.data() + sizeof d.depth, d.hue.data(), sizeof d.hue);
    return key;
}

std::string lmd_byte_key(const LocalMapDescriptor& d) {
    std::string key(sizeof d.sector_hue_hist + sizeof d.sector_occupancy, '\0');
    std::memcpy(key.data(), d.sector_hue_hist.data(), sizeof d.sector_hue_hist);
    std::memcpy(key.data() + sizeof d.sector_hue_hist, d.sector_occupancy.data(),
                sizeof d.sector_occupancy);
    return key;
}

int argmax_over_safe(const std::vector<double>& values, const std::vector<int>& safe) {
    int best = safe.front();
    double best_v = values[static_cast<std::size_t>(best)];
    for (std::size_t i = 1; i < safe.size(); ++i) {
        const double v = values[static_cast<std::size_t>(safe[i])];
        if (v > best_v) {
            best_v = v;
            best = safe[i];
        }
    }
    return best;
}

} // namespace

Planner make_teacher_planner(std::shared_ptr<const NnqlStore> store,
                             std::shared_ptr<const PlaceClassifier> fpv_classifier) {
    auto cache = std::make_shared<std::unordered_map<std::string, std::vector<double>>>();
    return [store, fpv_classifier, cache](const GridWorkspace& w, const Pose& p,
                                          const std::vector<int>& safe, Rng&) {
        const FpvDescriptor desc = sense_fpv(w, p);
        const std::string key = fpv_byte_key(desc);
        auto it = cache->find(key);
        if (it == cache->end()) {
            const auto qs = store->q_lookup_all(
                rre(fpv_classifier->predict(fpv_features(desc))));
            it = cache->emplace(key, std::vector<double>(qs.begin(), qs.end())).first;
        }
        return argmax_over_safe(it->second, safe);
    };
}

Planner make_student_planner(std::shared_ptr<const MlpModel> model,
                             std::shared_ptr<const PlaceClassifier> tpv_classifier) {
    auto cache = std::make_shared<std::unordered_map<std::string, std::vector<double>>>();
    return [model, tpv_classifier, cache](const GridWorkspace& w, const Pose& p,
                                          const std::vector<int>& safe, Rng&) {
        const CanonicalLmd canon = canonicalize(sense_bev(w, p));
        const std::string key = lmd_byte_key(canon.descriptor);
        auto it = cache->find(key);
        if (it == cache->end()) {
            const std::vector<double> probs =
                model->forward(rre(tpv_classifier->predict(tpv_features(canon.descriptor))));
            it = cache->emplace(key, probs).first;
        }
        // Map the canonical-frame distribution back into the heading frame.
        std::vector<double> heading_frame(kActionCount);
        for (int c = 0; c < kActionCount; ++c)
            heading_frame[static_cast<std::size_t>(
                rotate_action_index_from_canonical(c, canon.shift))] =
                it->second[static_cast<std::size_t>(c)];
        return argmax_over_safe(heading_frame, safe);
    };
}

double EvalResult::achievement_rate() const {
    if (episodes.empty()) return 0.0;
    std::size_t reached = 0;
    for (const auto& e : episodes)
        if (e.reached) ++reached;
    return static_cast<double>(reached) / static_cast<double>(episodes.size());
}

EvalResult evaluate(const GridWorkspace& w, const Pose& goal, const Planner& planner,
                    int n_episodes, std::uint64_t master_seed,
                    const std::string& workspace_id, const std::string& planner_id) {
    if (w.free_cell_count() == 0) throw std::runtime_error("evaluate: no free cells");
    EvalResult result;
    result.workspace_id = workspace_id;
    result.planner_id = planner_id;
    result.episodes.resize(static_cast<std::size_t>(n_episodes));

    for (int i = 0; i < n_episodes; ++i) {
        Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
        EpisodeResult& ep = result.episodes[static_cast<std::size_t>(i)];
        Pose p = sample_free_pose(w, rng);
        ep.start = p;
        for (int step = 0; step < kEvalMaxSteps; ++step) {
            if (goal_reached(p, goal)) break;
            const std::vector<int> safe = safe_actions(w, p);
            if (safe.empty()) break; // stuck: counts as failure
            const int a = planner(w, p, safe, rng);
            auto out = step_with_bumper(w, p, a, rng);
            if (!out) break;
            p = out->pose_after;
            ep.steps = step + 1;
        }
        ep.reached = goal_reached(p, goal);
        ep.final_distance = std::hypot(p.x - goal.x, p.y - goal.y);
    }
    return result;
}

void write_episode_csv(const std::vector<EvalResult>& results, std::ostream& out) {
    out << "workspace,planner,episode,steps,reached,final_distance\n";
    char buf[64];
    for (const auto& r : results) {
        for (std::size_t i = 0; i < r.episodes.size(); ++i) {
            const auto& e = r.episodes[i];
            std::snprintf(buf, sizeof buf, "%.6f", e.final_distance);
            out << r.workspace_id << ',' << r.planner_id << ',' << i << ',' << e.steps << ','
                << (e.reached ? 1 : 0) << ',' << buf << '\n';
        }
    }
}

std::vector<EvalResult> read_episode_csv(std::istream& in) {
    std::vector<EvalResult> results;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty episode CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string ws, planner, field;
        if (!std::getline(ls, ws, ',') || !std::getline(ls, planner, ','))
            throw std::runtime_error("malformed episode CSV row");
        EpisodeResult e;
        std::getline(ls, field, ','); // episode index, implied by order
        std::getline(ls, field, ',');
        e.steps = std::stoi(field);
        std::getline(ls, field, ',');
        e.reached = field == "1";
        std::getline(ls, field, ',');
        e.final_distance = std::stod(field);

        if (results.empty() || results.back().workspace_id != ws ||
            results.back().planner_id != planner) {
            results.push_back(EvalResult{ws, planner, {}});
        }
        results.back().episodes.push_back(e);
    }
    return results;
}

void write_summary(const std::vector<EvalResult>& results, std::ostream& out) {
    if (results.empty()) throw std::invalid_argument("write_summary: no results");
    // Columns in the fixed order Random, NNQL, MLP.
    const std::vector<std::string> columns = {"random", "nnql", "mlp"};
    std::map<std::string, std::map<std::string, double>> table;
    std::vector<std::string> workspace_order;
    for (const auto& r : results) {
        if (!table.count(r.workspace_id)) workspace_order.push_back(r.workspace_id);
        table[r.workspace_id][r.planner_id] = 100.0 * r.achievement_rate();
    }
    std::sort(workspace_order.begin(), workspace_order.end());

    out << "Workspace";
    for (const auto& c : columns) {
        std::string label = c == "random" ? "Random" : (c == "nnql" ? "NNQL" : "MLP");
        out << " | " << label << " (%)";
    }
    out << '\n';
    char buf[32];
    for (const auto& ws : workspace_order) {
        out << ws;
        for (const auto& c : columns) {
            auto it = table[ws].find(c);
            if (it == table[ws].end()) {
                out << " | -";
            } else {
                std::snprintf(buf, sizeof buf, "%.2f", it->second);
                out << " | " << buf;
            }
        }
        out << '\n';
    }
}

} // namespace pgnav
