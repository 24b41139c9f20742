#include <doctest.h>

#include <cmath>

#include "pgnav/student.hpp"

using namespace pgnav;

namespace {

TrainBatch single_pair_batch(const std::vector<double>& x, const std::vector<double>& t) {
    TrainBatch b;
    b.inputs.resize(1, static_cast<Eigen::Index>(x.size()));
    b.targets.resize(1, static_cast<Eigen::Index>(t.size()));
    b.weights.resize(1);
    for (std::size_t i = 0; i < x.size(); ++i)
        b.inputs(0, static_cast<Eigen::Index>(i)) = x[i];
    for (std::size_t i = 0; i < t.size(); ++i)
        b.targets(0, static_cast<Eigen::Index>(i)) = t[i];
    b.weights[0] = 1.0;
    return b;
}

std::vector<double> random_distribution(int n, Rng& rng) {
    std::vector<double> p(static_cast<std::size_t>(n));
    double total = 0.0;
    for (double& v : p) total += (v = rng.unit() + 1e-6);
    for (double& v : p) v /= total;
    return p;
}

} // namespace

TEST_CASE("student model has the published parameter count") {
    const MlpModel m = MlpModel::student(1);
    CHECK(m.parameter_count() ==
          static_cast<std::size_t>(50) * 2048 + 2048 + 2048 * 1024 + 1024 + 1024 * 13 + 13);
}

TEST_CASE("forward of an all-zero model is uniform") {
    MlpModel m = MlpModel::init({5, 8, 6, 13}, 3);
    m.w1.setZero();
    m.w2.setZero();
    m.w3.setZero();
    const auto p = m.forward(std::vector<double>{0.1, 0.9, -2.0, 0.0, 4.0});
    for (double v : p) CHECK(v == doctest::Approx(1.0 / 13).epsilon(1e-12));
}

TEST_CASE("softmax output is shift invariant and sums to one") {
    MlpModel m = MlpModel::init({4, 6, 5, 7}, 11);
    const std::vector<double> x{0.3, -0.2, 0.8, 0.05};
    const auto base = m.forward(x);
    double sum = 0.0;
    for (double v : base) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    MlpModel shifted = m;
    shifted.b3.array() += 17.5; // constant shift of all logits
    const auto moved = shifted.forward(x);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(moved[i] == doctest::Approx(base[i]).epsilon(1e-9));
}

TEST_CASE("a dominant logit saturates its probability") {
    MlpModel m = MlpModel::init({3, 4, 4, 5}, 2);
    m.w1.setZero();
    m.w2.setZero();
    m.w3.setZero();
    m.b3.setZero();
    m.b3[2] = 60.0; // 60 above the rest
    const auto p = m.forward(std::vector<double>{0.0, 0.0, 0.0});
    CHECK(p[2] >= 1.0 - 1e-9);
}

TEST_CASE("forward rejects non-finite input") {
    const MlpModel m = MlpModel::init({2, 3, 3, 2}, 1);
    CHECK_THROWS(m.forward(std::vector<double>{1.0, std::nan("")}));
}

TEST_CASE("kd_loss closed forms") {
    const std::vector<double> uniform(13, 1.0 / 13);
    CHECK(kd_loss(uniform, uniform) == doctest::Approx(0.0).epsilon(1e-12));

    std::vector<double> onehot(13, 0.0);
    onehot[4] = 1.0;
    CHECK(kd_loss(onehot, uniform) == doctest::Approx(std::log(13.0)).epsilon(1e-9));

    Rng rng(8);
    const auto p = random_distribution(13, rng);
    CHECK(kd_loss(p, p) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("kd_loss is nonnegative and zero only at equality") {
    Rng rng(12);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto t = random_distribution(13, rng);
        const auto p = random_distribution(13, rng);
        const double loss = kd_loss(t, p);
        CHECK(loss >= 0.0);
        double max_gap = 0.0;
        for (int i = 0; i < 13; ++i)
            max_gap = std::max(max_gap,
                               std::abs(t[static_cast<std::size_t>(i)] -
                                        p[static_cast<std::size_t>(i)]));
        if (loss <= 1e-12) CHECK(max_gap < 1e-5);
    }
}

TEST_CASE("repeated steps on one pair overfit it") {
    MlpModel m = MlpModel::init({6, 16, 12, 13}, 21);
    AdamState opt = AdamState::for_model(m, 0.001);
    const std::vector<double> x{0.2, 0.1, 0.05, 0.3, 0.15, 0.2};
    Rng rng(3);
    const auto target = random_distribution(13, rng);
    const TrainBatch batch = single_pair_batch(x, target);

    double prev = 0.0;
    double loss = 0.0;
    int below_at = -1;
    for (int step = 1; step <= 500; ++step) {
        loss = train_step(m, opt, batch);
        if (step > 5) CHECK(loss <= prev + 1e-12); // monotone decrease after warmup
        prev = loss;
        if (below_at < 0 && loss < 1e-3) below_at = step;
    }
    CHECK(below_at > 0);
    CHECK(below_at <= 500);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
    MlpModel m = MlpModel::init({4, 8, 6, 13}, 5);
    const MlpModel before = m;
    AdamState opt = AdamState::for_model(m, 0.0);
    Rng rng(9);
    train_step(m, opt, single_pair_batch({0.1, 0.2, 0.3, 0.4}, random_distribution(13, rng)));
    CHECK(m.w1 == before.w1);
    CHECK(m.w2 == before.w2);
    CHECK(m.w3 == before.w3);
    CHECK(m.b1 == before.b1);
    CHECK(m.b2 == before.b2);
    CHECK(m.b3 == before.b3);
}

TEST_CASE("training is bit-deterministic given seed and data order") {
    Rng data_rng(31);
    auto run = [&](std::uint64_t seed) {
        MlpModel m = MlpModel::init({5, 12, 10, 13}, seed);
        AdamState opt = AdamState::for_model(m, 0.001);
        Rng rng(77);
        for (int step = 0; step < 50; ++step) {
            TrainBatch b;
            b.inputs.resize(4, 5);
            b.targets.resize(4, 13);
            b.weights.resize(4);
            Rng local(derive_seed(1000, static_cast<std::uint64_t>(step)));
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 5; ++j) b.inputs(i, j) = local.unit();
                const auto t = random_distribution(13, local);
                for (int j = 0; j < 13; ++j) b.targets(i, j) = t[static_cast<std::size_t>(j)];
                b.weights[i] = 1.0 + local.unit();
            }
            train_step(m, opt, b);
        }
        return m;
    };
    const MlpModel a = run(42);
    const MlpModel b = run(42);
    CHECK(a.w1 == b.w1);
    CHECK(a.w2 == b.w2);
    CHECK(a.w3 == b.w3);
    CHECK(a.b3 == b.b3);
}

TEST_CASE("analytic gradients match central finite differences") {
    // Reduced model, full parameter sweep, 10 random batches.
    const double h = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        MlpModel m = MlpModel::init({50, 32, 16, 13}, 100 + static_cast<std::uint64_t>(trial));
        Rng rng(500 + static_cast<std::uint64_t>(trial));
        TrainBatch b;
        const int n = 8;
        b.inputs.resize(n, 50);
        b.targets.resize(n, 13);
        b.weights.resize(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < 50; ++j) b.inputs(i, j) = rng.uniform(-1.0, 1.0);
            const auto t = random_distribution(13, rng);
            for (int j = 0; j < 13; ++j) b.targets(i, j) = t[static_cast<std::size_t>(j)];
            b.weights[i] = 1.0;
        }

        const MlpGradients g = mlp_gradients(m, b, nullptr);

        auto loss_at = [&]() {
            double loss = 0.0;
            mlp_gradients(m, b, &loss);
            return loss;
        };
        auto check_param = [&](double& param, double analytic) {
            const double saved = param;
            param = saved + h;
            const double up = loss_at();
            param = saved - h;
            const double down = loss_at();
            param = saved;
            const double fd = (up - down) / (2.0 * h);
            const double rel =
                std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-6});
            worst = std::max(worst, rel);
        };

        // Sweep a deterministic subset of each parameter block (full sweep of
        // the small blocks, strided sweep of w1).
        for (Eigen::Index i = 0; i < m.w1.size(); i += 7)
            check_param(m.w1.data()[i], g.w1.data()[i]);
        for (Eigen::Index i = 0; i < m.w2.size(); i += 3)
            check_param(m.w2.data()[i], g.w2.data()[i]);
        for (Eigen::Index i = 0; i < m.w3.size(); ++i)
            check_param(m.w3.data()[i], g.w3.data()[i]);
        for (Eigen::Index i = 0; i < m.b1.size(); ++i)
            check_param(m.b1.data()[i], g.b1.data()[i]);
        for (Eigen::Index i = 0; i < m.b2.size(); ++i)
            check_param(m.b2.data()[i], g.b2.data()[i]);
        for (Eigen::Index i = 0; i < m.b3.size(); ++i)
            check_param(m.b3.data()[i], g.b3.data()[i]);
    }
    CHECK(worst <= 1e-4);
}
