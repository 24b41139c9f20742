#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pgnav/distill.hpp"
#include "pgnav/pipeline.hpp"
#include "test_util.hpp"

using namespace pgnav;
using testutil::make_workspace;

namespace {

double harmonic13() {
    double h = 0.0;
    for (int k = 1; k <= 13; ++k) h += 1.0 / k;
    return h;
}

NnqlStore store_with_qs(const std::array<double, kActionCount>& qs) {
    NnqlStore store(2);
    LearningParams params;
    params.gamma = 0.0;
    params.alpha = 1.0; // single update writes q = R directly
    for (int a = 0; a < kActionCount; ++a)
        store.q_update({1.0, 0.0}, a, qs[static_cast<std::size_t>(a)], {0.0, 9.0}, params);
    return store;
}

std::vector<int> all_actions() {
    std::vector<int> v(kActionCount);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

} // namespace

TEST_CASE("action_rank_target with equal q follows index order") {
    NnqlStore store(2);
    const auto target = action_rank_target(store, {1.0, 0.0}, all_actions());
    const double h13 = harmonic13();
    CHECK(target[0] == doctest::Approx(1.0 / h13).epsilon(1e-12));
    CHECK(target[0] == doctest::Approx(0.3145).epsilon(1e-3));
    for (int i = 1; i < kActionCount; ++i)
        CHECK(target[static_cast<std::size_t>(i)] ==
              doctest::Approx((1.0 / (i + 1)) / h13).epsilon(1e-12));
    CHECK(std::accumulate(target.begin(), target.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("action_rank_target puts the favored action first") {
    std::array<double, kActionCount> qs{};
    qs[3] = 0.9;
    const auto target = action_rank_target(store_with_qs(qs), {1.0, 0.0}, all_actions());
    const double top = 1.0 / harmonic13();
    CHECK(target[3] == doctest::Approx(top).epsilon(1e-12));
    for (int i = 0; i < kActionCount; ++i)
        if (i != 3) CHECK(target[static_cast<std::size_t>(i)] < top);
}

TEST_CASE("action_rank_target is permutation equivariant") {
    std::array<double, kActionCount> qs{};
    for (int i = 0; i < kActionCount; ++i)
        qs[static_cast<std::size_t>(i)] = 0.01 * (i * 7 % 13);
    const auto base = action_rank_target(store_with_qs(qs), {1.0, 0.0}, all_actions());

    // Swap two q values and expect the corresponding entries to swap.
    std::swap(qs[2], qs[9]);
    const auto swapped = action_rank_target(store_with_qs(qs), {1.0, 0.0}, all_actions());
    CHECK(swapped[2] == base[9]);
    CHECK(swapped[9] == base[2]);
    for (int i = 0; i < kActionCount; ++i)
        if (i != 2 && i != 9)
            CHECK(swapped[static_cast<std::size_t>(i)] == base[static_cast<std::size_t>(i)]);
}

TEST_CASE("unsafe actions rank strictly below safe ones") {
    std::array<double, kActionCount> qs{};
    qs[5] = 10.0; // huge q, but unsafe below
    const std::vector<int> safe = {1, 2, 3};
    const auto target = action_rank_target(store_with_qs(qs), {1.0, 0.0}, safe);
    // argmax must be the best safe action even though q favors action 5.
    const auto argmax = std::max_element(target.begin(), target.end()) - target.begin();
    CHECK((argmax == 1 || argmax == 2 || argmax == 3));
    for (int s : safe)
        CHECK(target[static_cast<std::size_t>(s)] > target[5]);
}

TEST_CASE("rank target argmax equals the safe-greedy action") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::array<double, kActionCount> qs{};
        for (auto& q : qs) q = rng.uniform(-1.0, 1.0);
        const NnqlStore store = store_with_qs(qs);
        std::vector<int> safe;
        for (int a = 0; a < kActionCount; ++a)
            if (rng.unit() < 0.6) safe.push_back(a);
        if (safe.empty()) continue;

        const auto target = action_rank_target(store, {1.0, 0.0}, safe);
        Rng greedy_rng(1);
        const int greedy = select_action(store, {1.0, 0.0}, safe, 0.0, greedy_rng);
        const auto argmax = std::max_element(target.begin(), target.end()) - target.begin();
        CHECK(static_cast<int>(argmax) == greedy);
        CHECK(std::accumulate(target.begin(), target.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("action distributions rotate consistently between frames") {
    Rng rng(17);
    std::vector<double> dist(kActionCount);
    double total = 0.0;
    for (double& v : dist) total += (v = rng.unit());
    for (double& v : dist) v /= total;

    for (int shift = 0; shift < 12; ++shift) {
        const auto canonical = rotate_action_distribution(dist, shift);
        CHECK(canonical[0] == dist[0]); // the random turn stays put
        CHECK(std::accumulate(canonical.begin(), canonical.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-12));
        // Mapping indices back recovers the original distribution.
        for (int c = 0; c < kActionCount; ++c) {
            const int heading_frame = rotate_action_index_from_canonical(c, shift);
            CHECK(canonical[static_cast<std::size_t>(c)] ==
                  dist[static_cast<std::size_t>(heading_frame)]);
        }
    }
    CHECK(rotate_action_distribution(dist, 0) == dist);
}

namespace {

GridWorkspace two_room_workspace() {
    return make_workspace(50, 20, [](int cx, int cy) {
        const bool left = cx >= 2 && cx <= 20 && cy >= 2 && cy <= 17;
        const bool right = cx >= 30 && cx <= 47 && cy >= 2 && cy <= 17;
        const bool door = cx > 20 && cx < 30 && cy >= 7 && cy <= 12;
        std::uint8_t hue = left ? 40 : (right ? 200 : 120);
        return std::pair{!(left || right || door), hue};
    });
}

} // namespace

TEST_CASE("build_kd_dataset merges revisits and conserves weight") {
    const GridWorkspace w = two_room_workspace();
    const Pose goal{4.25, 1.05, 0.0};
    const auto classifiers = train_classifiers(w, 2, 7);
    NnqlStore store(kFpvClassCount); // untrained teacher is fine for merging

    KdBuildConfig cfg;
    cfg.n_states = 300;
    Rng rng(5);
    const auto dataset = build_kd_dataset(w, goal, store, classifiers.fpv,
                                          classifiers.tpv, cfg, rng);
    REQUIRE(!dataset.empty());
    CHECK(dataset.size() <= 300);

    double weight_total = 0.0;
    for (const auto& s : dataset) {
        CHECK(s.weight >= 1.0);
        weight_total += s.weight;
        CHECK(std::accumulate(s.input.begin(), s.input.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::accumulate(s.target.begin(), s.target.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-9));
        CHECK(s.input.size() == static_cast<std::size_t>(kTpvClassCount));
        CHECK(s.target.size() == static_cast<std::size_t>(kActionCount));
    }
    CHECK(weight_total == doctest::Approx(300.0).epsilon(1e-9));
    // Keys are unique after merging.
    for (std::size_t i = 0; i < dataset.size(); ++i)
        for (std::size_t j = i + 1; j < dataset.size(); ++j)
            CHECK_FALSE(dataset[i].key == dataset[j].key);

    CHECK_THROWS(build_kd_dataset(w, goal, store, classifiers.fpv, classifiers.tpv,
                                  KdBuildConfig{0, 0.1, 50}, rng));
}

TEST_CASE("visits to one pose at 30-degree multiples share one merged sample") {
    const GridWorkspace w = two_room_workspace();
    // Two direct probes through the canonical pipeline.
    const CanonicalLmd a = canonicalize(sense_bev(w, Pose{1.05, 1.05, 0.0}));
    const CanonicalLmd b = canonicalize(sense_bev(w, Pose{1.05, 1.05, 60.0}));
    CHECK(dedup_key(a) == dedup_key(b));
}

TEST_CASE("distill overfits a single-sample dataset") {
    Rng data_rng(23);
    std::vector<double> input(kTpvClassCount, 0.0);
    input[7] = 0.6;
    input[12] = 0.4;
    std::vector<double> target(kActionCount);
    double total = 0.0;
    for (double& v : target) total += (v = data_rng.unit() + 0.01);
    for (double& v : target) v /= total;

    std::vector<KdSample> dataset = {{input, target, DedupKey{1, 2}, 1.0}};
    DistillConfig cfg;
    cfg.max_epochs = 600;
    Rng rng(9);
    const MlpModel m = distill(dataset, MlpModel::student(77), cfg, rng);
    CHECK(kd_loss(target, m.forward(input)) < 1e-3);
}

TEST_CASE("distill is deterministic given the seed") {
    Rng data_rng(29);
    std::vector<KdSample> dataset;
    for (int i = 0; i < 12; ++i) {
        std::vector<double> input(kTpvClassCount);
        double ti = 0.0;
        for (double& v : input) ti += (v = data_rng.unit());
        for (double& v : input) v /= ti;
        std::vector<double> target(kActionCount);
        double tt = 0.0;
        for (double& v : target) tt += (v = data_rng.unit());
        for (double& v : target) v /= tt;
        dataset.push_back({input, target, DedupKey{static_cast<std::uint64_t>(i), 0}, 1.0});
    }
    DistillConfig cfg;
    cfg.max_epochs = 3;
    Rng r1(4), r2(4);
    const MlpModel a = distill(dataset, MlpModel::student(5), cfg, r1);
    const MlpModel b = distill(dataset, MlpModel::student(5), cfg, r2);
    CHECK(a.w1 == b.w1);
    CHECK(a.w2 == b.w2);
    CHECK(a.w3 == b.w3);
}

TEST_CASE("kd dataset text round trip is bit exact") {
    Rng rng(31);
    std::vector<KdSample> dataset;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> input(kTpvClassCount);
        for (double& v : input) v = rng.unit();
        std::vector<double> target(kActionCount);
        for (double& v : target) v = rng.unit();
        dataset.push_back({input, target,
                           DedupKey{rng.next_u64(), rng.next_u64()},
                           1.0 + static_cast<double>(rng.below(5))});
    }
    std::ostringstream os;
    write_kd_dataset(dataset, os);
    std::istringstream is(os.str());
    const auto loaded = read_kd_dataset(is);
    REQUIRE(loaded.size() == dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        CHECK(loaded[i].key == dataset[i].key);
        CHECK(loaded[i].weight == dataset[i].weight);
        CHECK(loaded[i].input == dataset[i].input);
        CHECK(loaded[i].target == dataset[i].target);
    }
}
