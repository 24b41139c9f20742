#include "pgnav/student.hpp"

#include <cmath>
#include <stdexcept>

namespace pgnav {

namespace {

Eigen::MatrixXd glorot_uniform(int rows, int cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m(r, c) = rng.uniform(-limit, limit);
    return m;
}

Eigen::RowVectorXd softmax_row(const Eigen::RowVectorXd& z) {
    const double m = z.maxCoeff();
    Eigen::RowVectorXd e = (z.array() - m).exp();
    return e / e.sum();
}

} // namespace

MlpModel MlpModel::init(std::array<int, 4> sizes, std::uint64_t seed) {
    Rng rng(seed);
    MlpModel m;
    m.sizes = sizes;
    m.w1 = glorot_uniform(sizes[1], sizes[0], rng);
    m.b1 = Eigen::VectorXd::Zero(sizes[1]);
    m.w2 = glorot_uniform(sizes[2], sizes[1], rng);
    m.b2 = Eigen::VectorXd::Zero(sizes[2]);
    m.w3 = glorot_uniform(sizes[3], sizes[2], rng);
    m.b3 = Eigen::VectorXd::Zero(sizes[3]);
    return m;
}

std::size_t MlpModel::parameter_count() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size() +
                                    w3.size() + b3.size());
}

Eigen::VectorXd MlpModel::forward(const Eigen::VectorXd& x) const {
    if (!x.allFinite()) throw std::invalid_argument("forward: non-finite input");
    Eigen::VectorXd a1 = ((w1 * x + b1).array().max(0.0)).matrix();
    Eigen::VectorXd a2 = ((w2 * a1 + b2).array().max(0.0)).matrix();
    Eigen::VectorXd z3 = w3 * a2 + b3;
    const double m = z3.maxCoeff();
    Eigen::VectorXd e = (z3.array() - m).exp();
    return e / e.sum();
}

std::vector<double> MlpModel::forward(const std::vector<double>& x) const {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(),
                                                          static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd p = forward(v);
    return {p.data(), p.data() + p.size()};
}

double kd_loss(const std::vector<double>& target, const std::vector<double>& pred) {
    if (target.size() != pred.size())
        throw std::invalid_argument("kd_loss: size mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] <= 0.0) continue;
        loss += target[i] * std::log(target[i] / pred[i]);
    }
    return loss;
}

AdamState AdamState::for_model(const MlpModel& m, double lr) {
    AdamState s;
    s.learning_rate = lr;
    s.mw1 = Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols());
    s.vw1 = s.mw1;
    s.mw2 = Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols());
    s.vw2 = s.mw2;
    s.mw3 = Eigen::MatrixXd::Zero(m.w3.rows(), m.w3.cols());
    s.vw3 = s.mw3;
    s.mb1 = Eigen::VectorXd::Zero(m.b1.size());
    s.vb1 = s.mb1;
    s.mb2 = Eigen::VectorXd::Zero(m.b2.size());
    s.vb2 = s.mb2;
    s.mb3 = Eigen::VectorXd::Zero(m.b3.size());
    s.vb3 = s.mb3;
    return s;
}

MlpGradients mlp_gradients(const MlpModel& m, const TrainBatch& batch, double* loss_out) {
    const auto n = batch.inputs.rows();
    if (n == 0) throw std::invalid_argument("mlp_gradients: empty batch");

    Eigen::MatrixXd z1 = batch.inputs * m.w1.transpose();
    z1.rowwise() += m.b1.transpose();
    Eigen::MatrixXd a1 = z1.array().max(0.0);
    Eigen::MatrixXd z2 = a1 * m.w2.transpose();
    z2.rowwise() += m.b2.transpose();
    Eigen::MatrixXd a2 = z2.array().max(0.0);
    Eigen::MatrixXd z3 = a2 * m.w3.transpose();
    z3.rowwise() += m.b3.transpose();

    Eigen::MatrixXd p(n, z3.cols());
    for (Eigen::Index i = 0; i < n; ++i) p.row(i) = softmax_row(z3.row(i));

    // loss = (1/n) sum_i w_i * KL(t_i || p_i); dloss/dz3 = (w_i/n) (p_i - t_i)
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double kl = 0.0;
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            const double t = batch.targets(i, j);
            if (t > 0.0) kl += t * std::log(t / p(i, j));
        }
        loss += batch.weights[i] * kl;
    }
    loss /= static_cast<double>(n);
    if (loss_out) *loss_out = loss;

    Eigen::MatrixXd d3 = (p - batch.targets).array().colwise() *
                         (batch.weights.array() / static_cast<double>(n));
    Eigen::MatrixXd d2 = (d3 * m.w3).array() * (z2.array() > 0.0).cast<double>();
    Eigen::MatrixXd d1 = (d2 * m.w2).array() * (z1.array() > 0.0).cast<double>();

    MlpGradients g;
    g.w3 = d3.transpose() * a2;
    g.b3 = d3.colwise().sum().transpose();
    g.w2 = d2.transpose() * a1;
    g.b2 = d2.colwise().sum().transpose();
    g.w1 = d1.transpose() * batch.inputs;
    g.b1 = d1.colwise().sum().transpose();
    return g;
}

namespace {

void adam_apply(Eigen::MatrixXd& param, Eigen::MatrixXd& mom, Eigen::MatrixXd& vel,
                const Eigen::MatrixXd& grad, const AdamState& s, double bc1, double bc2) {
    mom = s.beta1 * mom + (1.0 - s.beta1) * grad;
    vel = (s.beta2 * vel.array() + (1.0 - s.beta2) * grad.array().square()).matrix();
    param.array() -=
        s.learning_rate * (mom.array() / bc1) / ((vel.array() / bc2).sqrt() + s.epsilon);
}

void adam_apply(Eigen::VectorXd& param, Eigen::VectorXd& mom, Eigen::VectorXd& vel,
                const Eigen::VectorXd& grad, const AdamState& s, double bc1, double bc2) {
    mom = s.beta1 * mom + (1.0 - s.beta1) * grad;
    vel = (s.beta2 * vel.array() + (1.0 - s.beta2) * grad.array().square()).matrix();
    param.array() -=
        s.learning_rate * (mom.array() / bc1) / ((vel.array() / bc2).sqrt() + s.epsilon);
}

} // namespace

double train_step(MlpModel& m, AdamState& opt, const TrainBatch& batch) {
    double loss = 0.0;
    MlpGradients g = mlp_gradients(m, batch, &loss);
    if (!g.w1.allFinite() || !g.w2.allFinite() || !g.w3.allFinite() ||
        !g.b1.allFinite() || !g.b2.allFinite() || !g.b3.allFinite())
        throw std::runtime_error("train_step: non-finite gradient");

    ++opt.step;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    adam_apply(m.w1, opt.mw1, opt.vw1, g.w1, opt, bc1, bc2);
    adam_apply(m.w2, opt.mw2, opt.vw2, g.w2, opt, bc1, bc2);
    adam_apply(m.w3, opt.mw3, opt.vw3, g.w3, opt, bc1, bc2);
    adam_apply(m.b1, opt.mb1, opt.vb1, g.b1, opt, bc1, bc2);
    adam_apply(m.b2, opt.mb2, opt.vb2, g.b2, opt, bc1, bc2);
    adam_apply(m.b3, opt.mb3, opt.vb3, g.b3, opt, bc1, bc2);
    return loss;
}

} // namespace pgnav
