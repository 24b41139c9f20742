#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "pgnav/distill.hpp"
#include "pgnav/embedding.hpp"
#include "pgnav/student.hpp"
#include "pgnav/teacher.hpp"

namespace pgnav {

inline constexpr int kEvalMaxSteps = 50;

// A planner picks one of the bumper-approved action indices.
using Planner = std::function<int(const GridWorkspace&, const Pose&,
                                  const std::vector<int>& safe, Rng&)>;

Planner make_random_planner();
// Greedy over teacher Q values (ties by lowest index). Lookups are memoized
// per descriptor, which is sound because the store is frozen during
// evaluation.
Planner make_teacher_planner(std::shared_ptr<const NnqlStore> store,
                             std::shared_ptr<const PlaceClassifier> fpv_classifier);
// Student pipeline: canonical local map -> TPV RRE -> MLP -> canonical-frame
// action, mapped back into the heading frame before execution.
Planner make_student_planner(std::shared_ptr<const MlpModel> model,
                             std::shared_ptr<const PlaceClassifier> tpv_classifier);

struct EpisodeResult {
    Pose start;
    int steps = 0;
    bool reached = false;
    double final_distance = 0.0;
};

struct EvalResult {
    std::string workspace_id;
    std::string planner_id;
    std::vector<EpisodeResult> episodes;

    double achievement_rate() const;
};

// Up to 50 bumper-guarded steps per episode from a random free start; an
// episode with an empty safe set counts as a failure. Episode i draws its
// own stream seeded with derive_seed(master_seed, i), so results are
// independent of execution order.
EvalResult evaluate(const GridWorkspace& w, const Pose& goal, const Planner& planner,
                    int n_episodes, std::uint64_t master_seed,
                    const std::string& workspace_id = "", const std::string& planner_id = "");

// Per-episode CSV: workspace,planner,episode,steps,reached,final_distance.
void write_episode_csv(const std::vector<EvalResult>& results, std::ostream& out);
std::vector<EvalResult> read_episode_csv(std::istream& in);

// Summary table of achievement rates in percent (two decimals), one row per
// workspace with Random, NNQL and MLP columns.
void write_summary(const std::vector<EvalResult>& results, std::ostream& out);

} // namespace pgnav
