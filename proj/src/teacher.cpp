#include "pgnav/teacher.hpp"

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace pgnav {

EpsilonSchedule EpsilonSchedule::for_budget(int episodes, double reach_fraction) {
    EpsilonSchedule s;
    const double t = std::max(1.0, reach_fraction * episodes);
    s.decay = std::exp(std::log(s.minimum / s.initial) / t);
    return s;
}

std::size_t NnqlStore::size() const {
    std::size_t n = 0;
    for (const auto& q : qs_) n += q.size();
    return n;
}

NnqlStore::Nearest NnqlStore::nearest(const std::vector<double>& s, int action) const {
    if (static_cast<int>(s.size()) != dim_)
        throw std::invalid_argument("NnqlStore: query has wrong dimension");
    const auto ai = static_cast<std::size_t>(action);
    const std::size_t count = qs_[ai].size();
    if (count == 0) return {};
    Eigen::Map<const Eigen::VectorXd> query(s.data(), static_cast<Eigen::Index>(s.size()));
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        rows(embeddings_[ai].data(), static_cast<Eigen::Index>(count), dim_);
    // d^2 = |e|^2 - 2 e.s + |s|^2; the |s|^2 term is common and dropped.
    Eigen::VectorXd score = rows * query;
    Nearest best{-1, 0.0};
    double best_key = 0.0;
    const double q2 = query.squaredNorm();
    for (std::size_t i = 0; i < count; ++i) {
        const double key = sqnorm_[ai][i] - 2.0 * score[static_cast<Eigen::Index>(i)];
        // Scanning in insertion order keeps the earliest entry on exact ties.
        if (best.index < 0 || key < best_key) {
            best.index = static_cast<int>(i);
            best_key = key;
        }
    }
    best.dist2 = std::max(0.0, best_key + q2);
    return best;
}

double NnqlStore::q_lookup(const std::vector<double>& s, int action) const {
    const Nearest n = nearest(s, action);
    if (n.index < 0) return 0.0;
    return qs_[static_cast<std::size_t>(action)][static_cast<std::size_t>(n.index)];
}

std::array<double, kActionCount> NnqlStore::q_lookup_all(const std::vector<double>& s) const {
    std::array<double, kActionCount> out{};
    for (int a = 0; a < kActionCount; ++a) out[static_cast<std::size_t>(a)] = q_lookup(s, a);
    return out;
}

void NnqlStore::q_update(const std::vector<double>& s, int action, double reward,
                         const std::vector<double>& s_next, const LearningParams& params) {
    double max_next = 0.0;
    bool first = true;
    for (int a = 0; a < kActionCount; ++a) {
        const double q = q_lookup(s_next, a);
        if (first || q > max_next) max_next = q;
        first = false;
    }
    const double target = reward + params.gamma * max_next;

    const auto ai = static_cast<std::size_t>(action);
    const Nearest n = nearest(s, action);
    int idx = n.index;
    if (idx < 0 || std::sqrt(n.dist2) > params.nn_threshold) {
        embeddings_[ai].insert(embeddings_[ai].end(), s.begin(), s.end());
        qs_[ai].push_back(0.0);
        order_[ai].push_back(insert_counter_++);
        double sq = 0.0;
        for (double v : s) sq += v * v;
        sqnorm_[ai].push_back(sq);
        idx = static_cast<int>(qs_[ai].size()) - 1;
    }
    double& q = qs_[ai][static_cast<std::size_t>(idx)];
    q += params.alpha * (target - q);
}

const NnqlStore::ActionEntries NnqlStore::action_entries(int action) const {
    const auto ai = static_cast<std::size_t>(action);
    return ActionEntries{embeddings_[ai], qs_[ai], order_[ai]};
}

void NnqlStore::restore_entry(int action, const std::vector<double>& embedding, double q,
                              std::uint64_t insert_order) {
    if (static_cast<int>(embedding.size()) != dim_)
        throw std::invalid_argument("restore_entry: wrong embedding dimension");
    const auto ai = static_cast<std::size_t>(action);
    embeddings_[ai].insert(embeddings_[ai].end(), embedding.begin(), embedding.end());
    qs_[ai].push_back(q);
    order_[ai].push_back(insert_order);
    double sq = 0.0;
    for (double v : embedding) sq += v * v;
    sqnorm_[ai].push_back(sq);
}

int select_action(const NnqlStore& store, const std::vector<double>& s,
                  const std::vector<int>& safe, double eps, Rng& rng) {
    if (safe.empty()) throw std::invalid_argument("select_action: empty safe set");
    if (rng.unit() < eps)
        return safe[static_cast<std::size_t>(rng.below(safe.size()))];
    int best = safe.front();
    double best_q = store.q_lookup(s, best);
    for (std::size_t i = 1; i < safe.size(); ++i) {
        const double q = store.q_lookup(s, safe[i]);
        if (q > best_q) {
            best_q = q;
            best = safe[i];
        }
    }
    return best;
}

std::vector<double> fpv_embedding(const GridWorkspace& w, const Pose& p,
                                  const PlaceClassifier& fpv_classifier) {
    return rre(fpv_classifier.predict(fpv_features(sense_fpv(w, p))));
}

Pose sample_free_pose(const GridWorkspace& w, Rng& rng, const CostField* reachable) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        const auto [cx, cy] = w.free_cell(rng.below(w.free_cell_count()));
        Pose p{w.cell_center_x(cx), w.cell_center_y(cy),
               static_cast<double>(rng.uniform_int(0, 359))};
        if (reachable && !std::isfinite(reachable->cost_at(p.x, p.y))) continue;
        return p;
    }
    throw std::runtime_error("sample_free_pose: no goal-reachable start found in 100 tries");
}

NnqlStore train_teacher(const GridWorkspace& w, const CostField& cost_field,
                        const PlaceClassifier& fpv_classifier,
                        const TeacherTrainConfig& cfg, Rng& rng) {
    NnqlStore store(fpv_classifier.class_count());
    EpsilonSchedule schedule = cfg.schedule;
    if (schedule.decay >= 1.0)
        schedule = EpsilonSchedule::for_budget(cfg.episodes);

    struct Transition {
        std::vector<double> s;
        int action;
        std::vector<double> s_next;
    };

    for (int episode = 0; episode < cfg.episodes; ++episode) {
        const double eps = schedule.at(episode);
        Pose p = sample_free_pose(w, rng, &cost_field);
        const Pose start = p;

        std::vector<Transition> transitions;
        std::vector<double> s = fpv_embedding(w, p, fpv_classifier);
        for (int step = 0; step < cfg.params.episode_len; ++step) {
            if (goal_reached(p, cost_field.goal())) break;
            const std::vector<int> safe = safe_actions(w, p);
            if (safe.empty()) break; // episode fails where no action is safe
            const int a = select_action(store, s, safe, eps, rng);
            auto out = step_with_bumper(w, p, a, rng);
            if (!out) break;
            p = out->pose_after;
            std::vector<double> s_next = fpv_embedding(w, p, fpv_classifier);
            transitions.push_back({std::move(s), a, s_next});
            s = std::move(s_next);
        }

        if (transitions.empty()) continue;
        const auto reward = episode_reward(cost_field, start, p);
        if (!reward) continue; // unreachable end: episode discarded
        for (std::size_t i = 0; i < transitions.size(); ++i) {
            const double r = (i + 1 == transitions.size()) ? *reward : 0.0;
            store.q_update(transitions[i].s, transitions[i].action, r,
                           transitions[i].s_next, cfg.params);
        }
    }
    return store;
}

} // namespace pgnav
