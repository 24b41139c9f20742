#include "pgnav/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pgnav {

int PlaceClassScheme::position_cell(double x, double y) const {
    int col = static_cast<int>(x / (width_m / kPositionCols));
    int row = static_cast<int>(y / (height_m / kPositionRows));
    col = std::clamp(col, 0, kPositionCols - 1);
    row = std::clamp(row, 0, kPositionRows - 1);
    return row * kPositionCols + col;
}

int PlaceClassScheme::angle_bin(double heading_deg) {
    return static_cast<int>(norm360(heading_deg + 15.0) / 30.0) % kAngleBins;
}

int pose_to_class(const PlaceClassScheme& scheme, const Pose& p, Modality modality) {
    const int cell = scheme.position_cell(p.x, p.y);
    if (modality == Modality::tpv) return cell;
    return cell * kAngleBins + PlaceClassScheme::angle_bin(p.heading);
}

std::vector<double> rre(const std::vector<double>& probabilities) {
    const std::size_t n = probabilities.size();
    if (n == 0) throw std::invalid_argument("rre: empty probability vector");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return probabilities[static_cast<std::size_t>(a)] >
               probabilities[static_cast<std::size_t>(b)];
    });
    double harmonic = 0.0;
    for (std::size_t k = 1; k <= n; ++k) harmonic += 1.0 / static_cast<double>(k);
    std::vector<double> out(n);
    for (std::size_t rank = 0; rank < n; ++rank)
        out[static_cast<std::size_t>(order[rank])] =
            (1.0 / static_cast<double>(rank + 1)) / harmonic;
    return out;
}

std::vector<double> compress_600_to_50(const std::vector<double>& v) {
    if (v.size() != static_cast<std::size_t>(kFpvClassCount))
        throw std::invalid_argument("compress_600_to_50: input must have 600 entries");
    std::vector<double> out(kTpvClassCount, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i / kAngleBins] += v[i];
    return out;
}

Eigen::VectorXd fpv_features(const FpvDescriptor& d) {
    Eigen::VectorXd x(2 * kFpvRayCount);
    for (int r = 0; r < kFpvRayCount; ++r) {
        const auto ri = static_cast<std::size_t>(r);
        x[2 * r] = d.depth[ri] / kFpvMaxDepth;
        x[2 * r + 1] = static_cast<double>(d.hue[ri]) / 255.0;
    }
    return x;
}

Eigen::VectorXd tpv_features(const LocalMapDescriptor& d) {
    Eigen::VectorXd x(kBevSectorCount * kHueBinCount + kBevSectorCount);
    const double total = static_cast<double>(d.total_hue_count());
    int k = 0;
    for (int s = 0; s < kBevSectorCount; ++s)
        for (int b = 0; b < kHueBinCount; ++b)
            x[k++] = total > 0.0
                         ? d.sector_hue_hist[static_cast<std::size_t>(s)]
                                            [static_cast<std::size_t>(b)] / total
                         : 0.0;
    for (int s = 0; s < kBevSectorCount; ++s)
        x[k++] = d.sector_occupancy[static_cast<std::size_t>(s)];
    return x;
}

std::vector<double> PlaceClassifier::predict(const Eigen::VectorXd& x) const {
    Eigen::VectorXd logits = weights * x + bias;
    const double m = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - m).exp();
    e /= e.sum();
    return {e.data(), e.data() + e.size()};
}

PlaceClassifier train_classifier(Modality kind, int class_count,
                                 const std::vector<LabeledSample>& samples,
                                 const ClassifierTrainOptions& opts) {
    if (samples.empty()) throw std::invalid_argument("train_classifier: no samples");
    const int dim = static_cast<int>(samples.front().features.size());
    const int n = static_cast<int>(samples.size());

    Eigen::MatrixXd X(n, dim);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        if (s.features.size() != dim)
            throw std::invalid_argument("train_classifier: inconsistent feature size");
        if (s.label < 0 || s.label >= class_count)
            throw std::invalid_argument("train_classifier: label out of range");
        X.row(i) = s.features.transpose();
        labels[static_cast<std::size_t>(i)] = s.label;
    }

    PlaceClassifier c;
    c.kind = kind;
    c.weights = Eigen::MatrixXd::Zero(class_count, dim);
    c.bias = Eigen::VectorXd::Zero(class_count);

    // Full-batch Adam; the cross-entropy is convex in (W, b) so a zero start
    // is fine and keeps training order-independent.
    Eigen::MatrixXd mw = Eigen::MatrixXd::Zero(class_count, dim);
    Eigen::MatrixXd vw = Eigen::MatrixXd::Zero(class_count, dim);
    Eigen::VectorXd mb = Eigen::VectorXd::Zero(class_count);
    Eigen::VectorXd vb = Eigen::VectorXd::Zero(class_count);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    double prev_loss = std::numeric_limits<double>::infinity();
    for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
        Eigen::MatrixXd logits = X * c.weights.transpose();
        logits.rowwise() += c.bias.transpose();
        Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
        Eigen::MatrixXd p = (logits.colwise() - row_max).array().exp();
        Eigen::VectorXd row_sum = p.rowwise().sum();
        p.array().colwise() /= row_sum.array();

        double loss = 0.0;
        for (int i = 0; i < n; ++i) {
            const int y = labels[static_cast<std::size_t>(i)];
            loss -= std::log(std::max(p(i, y), 1e-300));
            p(i, y) -= 1.0; // p becomes dL/dlogits * n
        }
        loss /= n;
        p /= static_cast<double>(n);

        Eigen::MatrixXd gw = p.transpose() * X;
        Eigen::VectorXd gb = p.colwise().sum().transpose();

        const double bc1 = 1.0 - std::pow(beta1, epoch);
        const double bc2 = 1.0 - std::pow(beta2, epoch);
        mw = beta1 * mw + (1.0 - beta1) * gw;
        vw = beta2 * vw.array().matrix() + (1.0 - beta2) * gw.array().square().matrix();
        mb = beta1 * mb + (1.0 - beta1) * gb;
        vb = beta2 * vb.array().matrix() + (1.0 - beta2) * gb.array().square().matrix();
        c.weights.array() -=
            opts.learning_rate * (mw.array() / bc1) / ((vw.array() / bc2).sqrt() + eps);
        c.bias.array() -=
            opts.learning_rate * (mb.array() / bc1) / ((vb.array() / bc2).sqrt() + eps);

        if (std::abs(prev_loss - loss) < opts.loss_tolerance) break;
        prev_loss = loss;
    }
    return c;
}

double classifier_accuracy(const PlaceClassifier& c, const std::vector<LabeledSample>& samples) {
    if (samples.empty()) return 0.0;
    int hits = 0;
    for (const auto& s : samples) {
        Eigen::VectorXd logits = c.weights * s.features + c.bias;
        int arg = 0;
        logits.maxCoeff(&arg);
        if (arg == s.label) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

} // namespace pgnav
