#include "pgnav/pipeline.hpp"

#include <memory>
#include <stdexcept>

#include "pgnav/canonical.hpp"

namespace pgnav {

namespace {

// Free cells grouped by position cell of the 10x5 scheme.
std::vector<std::vector<std::pair<int, int>>> free_cells_by_position(
    const GridWorkspace& w, const PlaceClassScheme& scheme) {
    std::vector<std::vector<std::pair<int, int>>> groups(kTpvClassCount);
    for (int cy = 0; cy < w.height_cells(); ++cy)
        for (int cx = 0; cx < w.width_cells(); ++cx)
            if (!w.occupied_cell(cx, cy)) {
                const int cell =
                    scheme.position_cell(w.cell_center_x(cx), w.cell_center_y(cy));
                groups[static_cast<std::size_t>(cell)].push_back({cx, cy});
            }
    return groups;
}

Pose random_pose_in_cell(std::pair<int, int> cell, double heading,
                         Rng& rng) {
    // Keep the point strictly interior so rounding cannot cross a cell edge.
    return Pose{(cell.first + 0.05 + 0.9 * rng.unit()) * kCellResolution,
                (cell.second + 0.05 + 0.9 * rng.unit()) * kCellResolution, norm360(heading)};
}

} // namespace

std::vector<LabeledSample> collect_fpv_samples(const GridWorkspace& w,
                                               const PlaceClassScheme& scheme,
                                               int samples_per_class, Rng& rng) {
    const auto groups = free_cells_by_position(w, scheme);
    std::vector<LabeledSample> samples;
    for (int pos = 0; pos < kTpvClassCount; ++pos) {
        const auto& cells = groups[static_cast<std::size_t>(pos)];
        if (cells.empty()) continue;
        for (int bin = 0; bin < kAngleBins; ++bin) {
            for (int k = 0; k < samples_per_class; ++k) {
                const auto cell = cells[static_cast<std::size_t>(rng.below(cells.size()))];
                const double heading = 30.0 * bin + rng.uniform_int(-15, 14);
                const Pose p = random_pose_in_cell(cell, heading, rng);
                samples.push_back(
                    {fpv_features(sense_fpv(w, p)), pos * kAngleBins + bin});
            }
        }
    }
    return samples;
}

std::vector<LabeledSample> collect_tpv_samples(const GridWorkspace& w,
                                               const PlaceClassScheme& scheme,
                                               int samples_per_class, Rng& rng) {
    const auto groups = free_cells_by_position(w, scheme);
    std::vector<LabeledSample> samples;
    for (int pos = 0; pos < kTpvClassCount; ++pos) {
        const auto& cells = groups[static_cast<std::size_t>(pos)];
        if (cells.empty()) continue;
        for (int k = 0; k < samples_per_class; ++k) {
            const auto cell = cells[static_cast<std::size_t>(rng.below(cells.size()))];
            const Pose p =
                random_pose_in_cell(cell, rng.uniform_int(0, 359), rng);
            samples.push_back(
                {tpv_features(canonicalize(sense_bev(w, p)).descriptor), pos});
        }
    }
    return samples;
}

TrainedClassifiers train_classifiers(const GridWorkspace& w, int samples_per_class,
                                     std::uint64_t seed) {
    const PlaceClassScheme scheme(w);
    TrainedClassifiers out;

    Rng fpv_rng(derive_seed(seed, 101));
    const auto fpv_samples = collect_fpv_samples(w, scheme, samples_per_class, fpv_rng);
    ClassifierTrainOptions fpv_opts;
    fpv_opts.seed = derive_seed(seed, 102);
    out.fpv = train_classifier(Modality::fpv, kFpvClassCount, fpv_samples, fpv_opts);
    out.fpv_train_accuracy = classifier_accuracy(out.fpv, fpv_samples);

    Rng tpv_rng(derive_seed(seed, 103));
    // The TPV side has 12x fewer classes; use more samples per class.
    const auto tpv_samples =
        collect_tpv_samples(w, scheme, samples_per_class * kAngleBins, tpv_rng);
    ClassifierTrainOptions tpv_opts;
    tpv_opts.seed = derive_seed(seed, 104);
    out.tpv = train_classifier(Modality::tpv, kTpvClassCount, tpv_samples, tpv_opts);
    out.tpv_train_accuracy = classifier_accuracy(out.tpv, tpv_samples);
    return out;
}

ExperimentArtifacts run_training_pipeline(const GridWorkspace& w,
                                          const ExperimentSettings& s) {
    if (!pose_valid(w, s.goal))
        throw std::runtime_error("experiment goal must lie on a free cell");

    ExperimentArtifacts a{train_classifiers(w, s.samples_per_class, s.seed),
                          NnqlStore(kFpvClassCount),
                          {},
                          MlpModel::student(derive_seed(s.seed, 401))};

    const CostField cost_field = build_cost_field(w, s.goal);

    TeacherTrainConfig teacher_cfg;
    teacher_cfg.episodes = s.teacher_episodes;
    Rng teacher_rng(derive_seed(s.seed, 201));
    a.teacher = train_teacher(w, cost_field, a.classifiers.fpv, teacher_cfg, teacher_rng);

    KdBuildConfig kd_cfg;
    kd_cfg.n_states = s.kd_states;
    Rng kd_rng(derive_seed(s.seed, 301));
    a.kd_dataset = build_kd_dataset(w, s.goal, a.teacher, a.classifiers.fpv,
                                    a.classifiers.tpv, kd_cfg, kd_rng);

    DistillConfig distill_cfg;
    distill_cfg.max_epochs = s.distill_epochs;
    Rng distill_rng(derive_seed(s.seed, 402));
    a.student = distill(a.kd_dataset, std::move(a.student), distill_cfg, distill_rng);
    return a;
}

std::vector<EvalResult> evaluate_all_planners(const GridWorkspace& w,
                                              const ExperimentArtifacts& a,
                                              const ExperimentSettings& s,
                                              const std::string& workspace_id) {
    const std::uint64_t eval_seed = derive_seed(s.seed, 501);
    std::vector<EvalResult> results;
    results.push_back(evaluate(w, s.goal, make_random_planner(), s.eval_episodes, eval_seed,
                               workspace_id, "random"));
    results.push_back(evaluate(
        w, s.goal,
        make_teacher_planner(std::make_shared<NnqlStore>(a.teacher),
                             std::make_shared<PlaceClassifier>(a.classifiers.fpv)),
        s.eval_episodes, eval_seed, workspace_id, "nnql"));
    results.push_back(evaluate(
        w, s.goal,
        make_student_planner(std::make_shared<MlpModel>(a.student),
                             std::make_shared<PlaceClassifier>(a.classifiers.tpv)),
        s.eval_episodes, eval_seed, workspace_id, "mlp"));
    return results;
}

} // namespace pgnav
