#include "pgnav/distill.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace pgnav {

std::vector<double> action_rank_target(const NnqlStore& store, const std::vector<double>& s,
                                       const std::vector<int>& safe) {
    if (safe.empty()) throw std::invalid_argument("action_rank_target: empty safe set");
    const std::array<double, kActionCount> qs = store.q_lookup_all(s);
    std::array<bool, kActionCount> is_safe{};
    for (int a : safe) is_safe[static_cast<std::size_t>(a)] = true;

    std::array<int, kActionCount> order;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto sa = is_safe[static_cast<std::size_t>(a)];
        const auto sb = is_safe[static_cast<std::size_t>(b)];
        if (sa != sb) return sa; // safe actions rank above all unsafe ones
        return qs[static_cast<std::size_t>(a)] > qs[static_cast<std::size_t>(b)];
    });

    double harmonic = 0.0;
    for (int k = 1; k <= kActionCount; ++k) harmonic += 1.0 / k;
    std::vector<double> target(kActionCount);
    for (int rank = 0; rank < kActionCount; ++rank)
        target[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] =
            (1.0 / (rank + 1)) / harmonic;
    return target;
}

namespace {

// Canonical-frame index of a heading-frame action under a canonicalization
// shift. The fixed angles are closed under 30-degree rotations.
int action_index_to_canonical(int index, int shift) {
    if (index == 0) return 0;
    int angle = kFixedAngles[static_cast<std::size_t>(index - 1)] - 30 * shift;
    angle = ((angle + 180) % 360 + 360) % 360 - 180; // wrap to (-180, 180]
    if (angle == -180) angle = 180;
    return fixed_action_index(angle);
}

} // namespace

std::vector<double> rotate_action_distribution(const std::vector<double>& dist, int shift) {
    if (dist.size() != static_cast<std::size_t>(kActionCount))
        throw std::invalid_argument("rotate_action_distribution: need 13 entries");
    std::vector<double> out(kActionCount, 0.0);
    for (int i = 0; i < kActionCount; ++i)
        out[static_cast<std::size_t>(action_index_to_canonical(i, shift))] =
            dist[static_cast<std::size_t>(i)];
    return out;
}

int rotate_action_index_from_canonical(int canonical_index, int shift) {
    if (canonical_index == 0) return 0;
    int angle = kFixedAngles[static_cast<std::size_t>(canonical_index - 1)] + 30 * shift;
    angle = ((angle + 180) % 360 + 360) % 360 - 180;
    if (angle == -180) angle = 180;
    return fixed_action_index(angle);
}

std::vector<KdSample> build_kd_dataset(const GridWorkspace& w, const Pose& goal,
                                       const NnqlStore& teacher,
                                       const PlaceClassifier& fpv_classifier,
                                       const PlaceClassifier& tpv_classifier,
                                       const KdBuildConfig& cfg, Rng& rng) {
    if (cfg.n_states <= 0)
        throw std::invalid_argument("build_kd_dataset: n_states must be positive");

    std::vector<KdSample> samples;
    std::unordered_map<DedupKey, std::size_t, DedupKeyHash> index;
    samples.reserve(static_cast<std::size_t>(cfg.n_states));

    int visited = 0;
    int stall_guard = 0;
    while (visited < cfg.n_states) {
        Pose p = sample_free_pose(w, rng);
        if (++stall_guard > 100 * cfg.n_states)
            throw std::runtime_error("build_kd_dataset: no reachable states");
        for (int step = 0; step < cfg.max_rollout_steps && visited < cfg.n_states; ++step) {
            const std::vector<int> safe = safe_actions(w, p);
            if (safe.empty()) break;

            const std::vector<double> s = fpv_embedding(w, p, fpv_classifier);
            const std::vector<double> target_heading_frame =
                action_rank_target(teacher, s, safe);

            const CanonicalLmd canon = canonicalize(sense_bev(w, p));
            const std::vector<double> input =
                rre(tpv_classifier.predict(tpv_features(canon.descriptor)));
            const std::vector<double> target =
                rotate_action_distribution(target_heading_frame, canon.shift);
            const DedupKey key = dedup_key(canon);

            auto it = index.find(key);
            if (it == index.end()) {
                index.emplace(key, samples.size());
                samples.push_back(KdSample{input, target, key, 1.0});
            } else {
                // Weight-average inputs and targets of merged visits.
                KdSample& merged = samples[it->second];
                const double wgt = merged.weight;
                for (std::size_t i = 0; i < merged.input.size(); ++i)
                    merged.input[i] = (merged.input[i] * wgt + input[i]) / (wgt + 1.0);
                for (std::size_t i = 0; i < merged.target.size(); ++i)
                    merged.target[i] = (merged.target[i] * wgt + target[i]) / (wgt + 1.0);
                merged.weight = wgt + 1.0;
            }
            ++visited;

            const int a = select_action(teacher, s, safe, cfg.exploration_eps, rng);
            auto out = step_with_bumper(w, p, a, rng);
            if (!out) break;
            p = out->pose_after;
            if (goal_reached(p, goal)) break;
        }
    }

    // Renormalize merged rows; averaging keeps sums at 1 up to rounding.
    for (KdSample& s : samples) {
        const double ti = std::accumulate(s.input.begin(), s.input.end(), 0.0);
        if (ti > 0.0)
            for (double& v : s.input) v /= ti;
        const double tt = std::accumulate(s.target.begin(), s.target.end(), 0.0);
        if (tt > 0.0)
            for (double& v : s.target) v /= tt;
    }
    return samples;
}

namespace {

TrainBatch make_batch(const std::vector<KdSample>& dataset, const std::vector<int>& ids,
                      std::size_t begin, std::size_t end) {
    const auto n = static_cast<Eigen::Index>(end - begin);
    const auto in_dim = static_cast<Eigen::Index>(dataset.front().input.size());
    const auto out_dim = static_cast<Eigen::Index>(dataset.front().target.size());
    TrainBatch b;
    b.inputs.resize(n, in_dim);
    b.targets.resize(n, out_dim);
    b.weights.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const KdSample& s = dataset[static_cast<std::size_t>(ids[begin + static_cast<std::size_t>(i)])];
        for (Eigen::Index j = 0; j < in_dim; ++j) b.inputs(i, j) = s.input[static_cast<std::size_t>(j)];
        for (Eigen::Index j = 0; j < out_dim; ++j) b.targets(i, j) = s.target[static_cast<std::size_t>(j)];
        b.weights[i] = s.weight;
    }
    return b;
}

double validation_kl(const MlpModel& m, const std::vector<KdSample>& dataset,
                     const std::vector<int>& ids) {
    double total = 0.0, weight = 0.0;
    for (int id : ids) {
        const KdSample& s = dataset[static_cast<std::size_t>(id)];
        total += s.weight * kd_loss(s.target, m.forward(s.input));
        weight += s.weight;
    }
    return weight > 0.0 ? total / weight : 0.0;
}

} // namespace

MlpModel distill(const std::vector<KdSample>& dataset, MlpModel m,
                 const DistillConfig& cfg, Rng& rng) {
    if (dataset.empty()) throw std::invalid_argument("distill: empty dataset");

    std::vector<int> ids(dataset.size());
    std::iota(ids.begin(), ids.end(), 0);
    // Fisher-Yates with the deterministic stream.
    for (std::size_t i = ids.size(); i > 1; --i)
        std::swap(ids[i - 1], ids[static_cast<std::size_t>(rng.below(i))]);

    std::size_t val_count = static_cast<std::size_t>(
        std::llround(cfg.validation_fraction * static_cast<double>(ids.size())));
    if (val_count == 0) val_count = 1;
    std::vector<int> val_ids, train_ids;
    if (ids.size() == 1) {
        val_ids = ids;
        train_ids = ids; // single sample: validate on the training point
    } else {
        val_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(val_count));
        train_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(val_count), ids.end());
    }

    AdamState opt = AdamState::for_model(m, cfg.learning_rate);
    double best_val = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        for (std::size_t i = train_ids.size(); i > 1; --i)
            std::swap(train_ids[i - 1], train_ids[static_cast<std::size_t>(rng.below(i))]);
        for (std::size_t begin = 0; begin < train_ids.size();
             begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(train_ids.size(), begin + static_cast<std::size_t>(cfg.batch_size));
            train_step(m, opt, make_batch(dataset, train_ids, begin, end));
        }
        const double val = validation_kl(m, dataset, val_ids);
        if (val < best_val - cfg.early_stop_delta) {
            best_val = val;
            stale_epochs = 0;
        } else if (++stale_epochs >= cfg.early_stop_patience) {
            break;
        }
    }
    return m;
}

void write_kd_dataset(const std::vector<KdSample>& dataset, std::ostream& out) {
    char buf[32];
    for (const KdSample& s : dataset) {
        out << s.key.to_hex();
        std::snprintf(buf, sizeof buf, "%.17g", s.weight);
        out << ' ' << buf;
        for (double v : s.input) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ' ' << buf;
        }
        for (double v : s.target) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ' ' << buf;
        }
        out << '\n';
    }
}

std::vector<KdSample> read_kd_dataset(std::istream& in) {
    std::vector<KdSample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key_hex;
        KdSample s;
        if (!(ls >> key_hex >> s.weight))
            throw std::runtime_error("kd dataset: malformed record");
        s.key = DedupKey::from_hex(key_hex);
        s.input.resize(kTpvClassCount);
        for (double& v : s.input)
            if (!(ls >> v)) throw std::runtime_error("kd dataset: truncated input vector");
        s.target.resize(kActionCount);
        for (double& v : s.target)
            if (!(ls >> v)) throw std::runtime_error("kd dataset: truncated target vector");
        out.push_back(std::move(s));
    }
    return out;
}

void write_kd_dataset_file(const std::vector<KdSample>& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_kd_dataset(dataset, out);
}

std::vector<KdSample> read_kd_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open kd dataset file: " + path);
    return read_kd_dataset(in);
}

} // namespace pgnav
