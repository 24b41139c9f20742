#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "pgnav/workspace.hpp"

namespace pgnav {

// Feedforward action classifier: two rectified hidden layers and a softmax
// over the 13 actions. Layer sizes are parameters so tests can run reduced
// models; the student configuration is 50 -> 2048 -> 1024 -> 13.
struct MlpModel {
    std::array<int, 4> sizes{50, 2048, 1024, 13};
    Eigen::MatrixXd w1, w2, w3; // h1 x in, h2 x h1, out x h2
    Eigen::VectorXd b1, b2, b3;

    static MlpModel init(std::array<int, 4> sizes, std::uint64_t seed);
    static MlpModel student(std::uint64_t seed) { return init({50, 2048, 1024, 13}, seed); }

    std::size_t parameter_count() const;

    // Softmax probabilities, numerically stabilized by max subtraction.
    // Throws on non-finite input.
    std::vector<double> forward(const std::vector<double>& x) const;
    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
};

// KL(target || pred) in nats; zero target entries contribute 0.
double kd_loss(const std::vector<double>& target, const std::vector<double>& pred);

struct AdamState {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;

    Eigen::MatrixXd mw1, vw1, mw2, vw2, mw3, vw3;
    Eigen::VectorXd mb1, vb1, mb2, vb2, mb3, vb3;

    static AdamState for_model(const MlpModel& m, double lr = 0.001);
};

struct TrainBatch {
    Eigen::MatrixXd inputs;  // batch x in
    Eigen::MatrixXd targets; // batch x out, rows are distributions
    Eigen::VectorXd weights; // per-sample loss weights (>= 1 for merged samples)
};

// Analytic gradients of the weighted mean KL loss for a batch; exposed so
// the finite-difference check can compare against them.
struct MlpGradients {
    Eigen::MatrixXd w1, w2, w3;
    Eigen::VectorXd b1, b2, b3;
};
MlpGradients mlp_gradients(const MlpModel& m, const TrainBatch& batch, double* loss_out);

// One Adam step on the weighted mean KL loss of the batch. Returns the
// batch loss. Throws on non-finite gradients.
double train_step(MlpModel& m, AdamState& opt, const TrainBatch& batch);

} // namespace pgnav
