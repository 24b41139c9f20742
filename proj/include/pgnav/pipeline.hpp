#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pgnav/distill.hpp"
#include "pgnav/embedding.hpp"
#include "pgnav/evaluate.hpp"
#include "pgnav/teacher.hpp"

namespace pgnav {

// Labeled descriptor sets for the place classifiers, sampled uniformly from
// the free cells of each position cell. Classes without free cells stay
// empty; fpv headings are drawn inside each 30-degree bin.
std::vector<LabeledSample> collect_fpv_samples(const GridWorkspace& w,
                                               const PlaceClassScheme& scheme,
                                               int samples_per_class, Rng& rng);
std::vector<LabeledSample> collect_tpv_samples(const GridWorkspace& w,
                                               const PlaceClassScheme& scheme,
                                               int samples_per_class, Rng& rng);

struct TrainedClassifiers {
    PlaceClassifier fpv;
    PlaceClassifier tpv;
    double fpv_train_accuracy = 0.0;
    double tpv_train_accuracy = 0.0;
};

TrainedClassifiers train_classifiers(const GridWorkspace& w, int samples_per_class,
                                     std::uint64_t seed);

// Bundle of artifacts produced by one seeded experiment on one workspace.
struct ExperimentArtifacts {
    TrainedClassifiers classifiers;
    NnqlStore teacher;
    std::vector<KdSample> kd_dataset;
    MlpModel student;
};

struct ExperimentSettings {
    Pose goal;
    std::uint64_t seed = 0;
    int samples_per_class = 8;
    int teacher_episodes = 5000;
    int kd_states = 2000;
    int eval_episodes = 500;
    int distill_epochs = 100;
};

// generate/load -> classifiers -> teacher -> KD dataset -> student.
ExperimentArtifacts run_training_pipeline(const GridWorkspace& w,
                                          const ExperimentSettings& s);

// Evaluate the random, teacher and student planners on the same seeds.
std::vector<EvalResult> evaluate_all_planners(const GridWorkspace& w,
                                              const ExperimentArtifacts& a,
                                              const ExperimentSettings& s,
                                              const std::string& workspace_id);

} // namespace pgnav
