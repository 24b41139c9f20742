#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "pgnav/sensing.hpp"
#include "pgnav/workspace.hpp"

namespace pgnav {

inline constexpr int kPositionCols = 10;
inline constexpr int kPositionRows = 5;
inline constexpr int kAngleBins = 12;
inline constexpr int kFpvClassCount = kPositionCols * kPositionRows * kAngleBins; // 600
inline constexpr int kTpvClassCount = kPositionCols * kPositionRows;              // 50

enum class Modality { fpv, tpv };

// 10x5 partition of the workspace bounding box plus 12 heading bins of 30
// degrees. fpv class = position_cell * 12 + angle_bin; tpv class = position
// cell only, so tpv(i) = i / 12.
struct PlaceClassScheme {
    double width_m = 0.0;
    double height_m = 0.0;

    explicit PlaceClassScheme(const GridWorkspace& w)
        : width_m(w.width_m()), height_m(w.height_m()) {}
    PlaceClassScheme(double width, double height) : width_m(width), height_m(height) {}

    int position_cell(double x, double y) const;
    static int angle_bin(double heading_deg); // bins centered on multiples of 30
};

int pose_to_class(const PlaceClassScheme& scheme, const Pose& p, Modality modality);

// L1-normalized reciprocal-rank embedding: the rank-r class (by descending
// probability, ties by ascending id) gets weight (1/r)/H_n.
std::vector<double> rre(const std::vector<double>& probabilities);

// out[j] = sum of v[i] with i/12 == j. Requires a 600-entry input; preserves
// the L1 norm exactly because terms are only regrouped.
std::vector<double> compress_600_to_50(const std::vector<double>& v);

// Fixed affine feature maps feeding the classifiers.
Eigen::VectorXd fpv_features(const FpvDescriptor& d);              // 64 values
Eigen::VectorXd tpv_features(const LocalMapDescriptor& d);         // 204 values

// Multinomial logistic model over descriptor features.
struct PlaceClassifier {
    Modality kind = Modality::fpv;
    Eigen::MatrixXd weights; // class_count x input_dim
    Eigen::VectorXd bias;    // class_count

    int input_dim() const { return static_cast<int>(weights.cols()); }
    int class_count() const { return static_cast<int>(weights.rows()); }

    // Softmax probabilities; sums to 1 within 1e-9.
    std::vector<double> predict(const Eigen::VectorXd& x) const;
};

struct ClassifierTrainOptions {
    double learning_rate = 0.05;
    int max_epochs = 500;
    double loss_tolerance = 1e-4; // stop when per-epoch loss change drops below
    std::uint64_t seed = 0;
};

struct LabeledSample {
    Eigen::VectorXd features;
    int label = 0;
};

// Full-batch Adam on the categorical cross-entropy, run to the loss-change
// threshold or max_epochs. Deterministic given the seed. Throws on an empty
// sample set.
PlaceClassifier train_classifier(Modality kind, int class_count,
                                 const std::vector<LabeledSample>& samples,
                                 const ClassifierTrainOptions& opts = {});

// Final mean cross-entropy and top-1 accuracy on a sample set.
double classifier_accuracy(const PlaceClassifier& c, const std::vector<LabeledSample>& samples);

} // namespace pgnav
