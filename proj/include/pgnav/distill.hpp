#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pgnav/canonical.hpp"
#include "pgnav/student.hpp"
#include "pgnav/teacher.hpp"

namespace pgnav {

// One distillation record: rotation-invariant TPV state, action target in
// the canonical frame, and the merge weight of deduplicated visits.
struct KdSample {
    std::vector<double> input;  // 50-dim TPV RRE
    std::vector<double> target; // 13-dim action distribution
    DedupKey key;
    double weight = 1.0;
};

// Reciprocal-rank distribution over the 13 actions: ranked by descending
// teacher Q, unsafe actions strictly below all safe ones, ties by ascending
// index; weight of rank r is (1/r)/H_13.
std::vector<double> action_rank_target(const NnqlStore& store, const std::vector<double>& s,
                                       const std::vector<int>& safe);

// Re-index a 13-action distribution between the heading frame and the
// canonical frame: a fixed turn of theta becomes a turn of theta - 30*shift
// (modulo 360) relative to the canonical axis; the random turn keeps index 0.
std::vector<double> rotate_action_distribution(const std::vector<double>& dist, int shift);
// Heading-frame action index corresponding to a canonical-frame index.
int rotate_action_index_from_canonical(int canonical_index, int shift);

struct KdBuildConfig {
    int n_states = 2000;
    double exploration_eps = 0.1; // residual exploration during rollouts
    int max_rollout_steps = 50;
};

// Collect visited states from epsilon-greedy teacher rollouts, embed them on
// both sides (FPV RRE for the target, canonical TPV RRE for the input), and
// merge samples whose canonical descriptors share a dedup key by
// weight-averaging inputs and targets.
std::vector<KdSample> build_kd_dataset(const GridWorkspace& w, const Pose& goal,
                                       const NnqlStore& teacher,
                                       const PlaceClassifier& fpv_classifier,
                                       const PlaceClassifier& tpv_classifier,
                                       const KdBuildConfig& cfg, Rng& rng);

struct DistillConfig {
    int batch_size = 32;
    int max_epochs = 100;
    double early_stop_delta = 1e-5; // minimum validation KL improvement
    int early_stop_patience = 10;   // epochs without improvement before stopping
    double validation_fraction = 0.1;
    double learning_rate = 0.001;
};

// Shuffled weighted mini-batch distillation of the dataset into the model.
// Deterministic given the rng state. Returns the trained model.
MlpModel distill(const std::vector<KdSample>& dataset, MlpModel m,
                 const DistillConfig& cfg, Rng& rng);

// Line-oriented dataset exchange format: key, weight, 50 inputs, 13 targets.
void write_kd_dataset(const std::vector<KdSample>& dataset, std::ostream& out);
std::vector<KdSample> read_kd_dataset(std::istream& in);
void write_kd_dataset_file(const std::vector<KdSample>& dataset, const std::string& path);
std::vector<KdSample> read_kd_dataset_file(const std::string& path);

} // namespace pgnav
