#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pgnav/embedding.hpp"
#include "pgnav/oracle.hpp"
#include "pgnav/workspace.hpp"

namespace pgnav {

struct LearningParams {
    double alpha = 0.1;        // learning rate of the Q update
    double gamma = 0.9;        // discount factor
    int episode_len = 4;       // training steps per episode
    double nn_threshold = 0.05; // embedding-space merge radius (tau)
};

struct EpsilonSchedule {
    double initial = 1.0;
    double minimum = 0.1;
    double decay = 1.0; // per-episode multiplier

    double at(int episode) const {
        const double eps = initial * std::pow(decay, episode);
        return eps < minimum ? minimum : eps;
    }
    // Decay that reaches the minimum at the given fraction of the budget.
    static EpsilonSchedule for_budget(int episodes, double reach_fraction = 0.5);
};

// Q-value memory indexed by nearest-neighbor search over state embeddings.
// Mutated only by q_update; a frozen store is safe for concurrent lookup.
class NnqlStore {
public:
    explicit NnqlStore(int dim = kFpvClassCount) : dim_(dim) {}

    int dim() const { return dim_; }
    std::size_t size() const;
    std::size_t size_for_action(int action) const {
        return qs_[static_cast<std::size_t>(action)].size();
    }

    // Q of the nearest stored embedding for the action (ties by earliest
    // insertion); 0 when the action has no entries.
    double q_lookup(const std::vector<double>& s, int action) const;

    // All 13 action lookups in one pass over the store.
    std::array<double, kActionCount> q_lookup_all(const std::vector<double>& s) const;

    // One iteration of Q(s,a) += alpha * (R + gamma * max_a' Q(s',a') - Q(s,a)),
    // applied to the nearest entry within nn_threshold or to a fresh zero
    // entry otherwise.
    void q_update(const std::vector<double>& s, int action, double reward,
                  const std::vector<double>& s_next, const LearningParams& params);

    // Internal layout, exposed for serialization.
    struct ActionEntries {
        std::vector<double> embeddings; // row-major, count x dim
        std::vector<double> qs;
        std::vector<std::uint64_t> insert_order;
    };
    const ActionEntries action_entries(int action) const;
    void restore_entry(int action, const std::vector<double>& embedding, double q,
                       std::uint64_t insert_order);
    std::uint64_t insertion_counter() const { return insert_counter_; }
    void set_insertion_counter(std::uint64_t c) { insert_counter_ = c; }

private:
    struct Nearest {
        int index = -1;
        double dist2 = 0.0;
    };
    Nearest nearest(const std::vector<double>& s, int action) const;

    int dim_;
    std::array<std::vector<double>, kActionCount> embeddings_; // row-major per action
    std::array<std::vector<double>, kActionCount> qs_;
    std::array<std::vector<std::uint64_t>, kActionCount> order_;
    std::array<std::vector<double>, kActionCount> sqnorm_;
    std::uint64_t insert_counter_ = 0;
};

// Epsilon-greedy selection over the bumper-approved set. Ties between equal
// Q values resolve to the lowest action index. Throws on an empty safe set.
int select_action(const NnqlStore& store, const std::vector<double>& s,
                  const std::vector<int>& safe, double eps, Rng& rng);

struct TeacherTrainConfig {
    int episodes = 5000;
    LearningParams params;
    EpsilonSchedule schedule; // decay filled by for_budget when left at 1.0
};

// Embedding of the teacher's first-person observation.
std::vector<double> fpv_embedding(const GridWorkspace& w, const Pose& p,
                                  const PlaceClassifier& fpv_classifier);

// Sample a pose at the center of a uniformly chosen free cell with an
// integer-degree heading; retries until the cell has finite cost (at most
// 100 tries) when a cost field is given.
Pose sample_free_pose(const GridWorkspace& w, Rng& rng, const CostField* reachable = nullptr);

// Epsilon-greedy NNQL training: per episode, up to episode_len bumper-guarded
// steps from a random start; the episode reward (difference of shortest-path
// costs between start and end) is applied to the final transition and 0 to
// the others, replayed in order.
NnqlStore train_teacher(const GridWorkspace& w, const CostField& cost_field,
                        const PlaceClassifier& fpv_classifier,
                        const TeacherTrainConfig& cfg, Rng& rng);

} // namespace pgnav
