#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pgnav/config.hpp"
#include "pgnav/evaluate.hpp"
#include "pgnav/genworkspace.hpp"
#include "pgnav/model_io.hpp"
#include "pgnav/pipeline.hpp"
#include "test_util.hpp"

using namespace pgnav;
using testutil::make_workspace;
using testutil::uniform_free;

TEST_CASE("evaluate scores an immediate goal as success with zero steps") {
    // Every free cell center lies within the goal radius.
    const GridWorkspace w = make_workspace(20, 20, [](int cx, int cy) {
        const bool pocket = cx >= 8 && cx <= 11 && cy >= 8 && cy <= 11;
        return std::pair{!pocket, std::uint8_t{0}};
    });
    const EvalResult r =
        evaluate(w, Pose{1.0, 1.0, 0.0}, make_random_planner(), 50, 7, "ws", "random");
    CHECK(r.achievement_rate() == 1.0);
    for (const auto& e : r.episodes) {
        CHECK(e.reached);
        CHECK(e.steps == 0);
        CHECK(e.final_distance <= 0.25);
    }
}

TEST_CASE("evaluate produces identical CSV bytes for one seed") {
    const GridWorkspace w = uniform_free(60, 40);
    const Pose goal{3.0, 2.0, 0.0};
    auto run = [&] {
        const EvalResult r =
            evaluate(w, goal, make_random_planner(), 40, 123, "ws0", "random");
        std::ostringstream os;
        write_episode_csv({r}, os);
        return os.str();
    };
    const std::string a = run();
    const std::string b = run();
    CHECK(a == b);
    // Episode order does not matter: per-episode seeds are derived.
    const EvalResult r = evaluate(w, goal, make_random_planner(), 40, 123, "ws0", "random");
    const EvalResult r10 = evaluate(w, goal, make_random_planner(), 10, 123, "ws0", "random");
    for (int i = 0; i < 10; ++i) {
        CHECK(r.episodes[static_cast<std::size_t>(i)].steps ==
              r10.episodes[static_cast<std::size_t>(i)].steps);
        CHECK(r.episodes[static_cast<std::size_t>(i)].final_distance ==
              r10.episodes[static_cast<std::size_t>(i)].final_distance);
    }
}

TEST_CASE("episode CSV round trips through the reader") {
    const GridWorkspace w = uniform_free(50, 30);
    const EvalResult r =
        evaluate(w, Pose{2.0, 1.0, 0.0}, make_random_planner(), 25, 9, "wsX", "random");
    std::ostringstream os;
    write_episode_csv({r}, os);
    std::istringstream is(os.str());
    const auto loaded = read_episode_csv(is);
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].workspace_id == "wsX");
    CHECK(loaded[0].planner_id == "random");
    REQUIRE(loaded[0].episodes.size() == 25);
    CHECK(loaded[0].achievement_rate() == r.achievement_rate());
}

TEST_CASE("summary formats rates as percentages with two decimals") {
    EvalResult random_r{"wsA", "random", {}};
    EvalResult nnql_r{"wsA", "nnql", {}};
    EvalResult mlp_r{"wsA", "mlp", {}};
    for (int i = 0; i < 100; ++i) {
        EpisodeResult e;
        e.reached = i < 50;
        random_r.episodes.push_back(e);
        e.reached = i < 85;
        nnql_r.episodes.push_back(e);
        e.reached = i < 80;
        mlp_r.episodes.push_back(e);
    }
    std::ostringstream os;
    write_summary({random_r, nnql_r, mlp_r}, os);
    const std::string text = os.str();
    CHECK(text.find("Random (%)") != std::string::npos);
    CHECK(text.find("NNQL (%)") != std::string::npos);
    CHECK(text.find("MLP (%)") != std::string::npos);
    CHECK(text.find("50.00") != std::string::npos);
    CHECK(text.find("85.00") != std::string::npos);
    CHECK(text.find("80.00") != std::string::npos);
    // Column order: Random before NNQL before MLP.
    CHECK(text.find("Random") < text.find("NNQL"));
    CHECK(text.find("NNQL") < text.find("MLP"));

    CHECK_THROWS(write_summary({}, os));

    // The reported rate agrees with a manual recount.
    int manual = 0;
    for (const auto& e : nnql_r.episodes)
        if (e.reached) ++manual;
    CHECK(nnql_r.achievement_rate() == doctest::Approx(manual / 100.0));
}

TEST_CASE("generated workspaces are reproducible and connected") {
    GenParams params;
    params.seed = 42;
    const GridWorkspace a = generate_workspace(params);
    const GridWorkspace b = generate_workspace(params);
    std::ostringstream sa, sb;
    write_workspace(a, sa);
    write_workspace(b, sb);
    CHECK(sa.str() == sb.str());

    // Flood fill: one free component.
    const int W = a.width_cells(), H = a.height_cells();
    std::vector<int> seen(static_cast<std::size_t>(W) * H, 0);
    std::vector<std::pair<int, int>> stack;
    std::size_t free_total = 0;
    for (int cy = 0; cy < H; ++cy)
        for (int cx = 0; cx < W; ++cx)
            if (!a.occupied_cell(cx, cy)) {
                ++free_total;
                if (stack.empty()) {
                    stack.push_back({cx, cy});
                    seen[static_cast<std::size_t>(cy) * W + cx] = 1;
                }
            }
    std::size_t visited = 0;
    while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++visited;
        const int dx[] = {1, -1, 0, 0};
        const int dy[] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            const int nx = cx + dx[d], ny = cy + dy[d];
            if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
            if (a.occupied_cell(nx, ny)) continue;
            if (seen[static_cast<std::size_t>(ny) * W + nx]) continue;
            seen[static_cast<std::size_t>(ny) * W + nx] = 1;
            stack.push_back({nx, ny});
        }
    }
    CHECK(visited == free_total);

    // Different seeds change the map.
    params.seed = 43;
    std::ostringstream sc;
    write_workspace(generate_workspace(params), sc);
    CHECK(sa.str() != sc.str());

    CHECK_THROWS(generate_workspace(GenParams{2.0, 5.0, 3, 0.9, 1}));
    CHECK_THROWS(generate_workspace(GenParams{10.0, 5.0, 1, 0.9, 1}));
    CHECK_THROWS(generate_workspace(GenParams{10.0, 5.0, 3, 0.3, 1}));
}

TEST_CASE("generated rooms have pairwise distinct dominant hue bins") {
    for (std::uint64_t seed : {1ULL, 7ULL, 99ULL}) {
        GenParams params;
        params.seed = seed;
        const GridWorkspace w = generate_workspace(params);
        // Rooms live in vertical slabs; take the dominant free-cell hue bin
        // of each slab.
        const int slab = w.width_cells() / params.rooms;
        std::vector<int> dominant;
        for (int r = 0; r < params.rooms; ++r) {
            std::array<int, 16> hist{};
            for (int cy = 0; cy < w.height_cells(); ++cy)
                for (int cx = r * slab; cx < (r + 1) * slab && cx < w.width_cells(); ++cx)
                    if (!w.occupied_cell(cx, cy))
                        ++hist[static_cast<std::size_t>(w.hue_cell(cx, cy) >> 4)];
            dominant.push_back(static_cast<int>(
                std::max_element(hist.begin(), hist.end()) - hist.begin()));
        }
        for (std::size_t i = 0; i < dominant.size(); ++i)
            for (std::size_t j = i + 1; j < dominant.size(); ++j)
                CHECK(dominant[i] != dominant[j]);
    }
}

TEST_CASE("model files round trip bit-exactly") {
    const std::string dir = "/tmp";

    SUBCASE("mlp forward outputs are identical to the last bit") {
        const MlpModel m = MlpModel::init({7, 20, 15, 13}, 3);
        const std::string path = dir + "/pgnav_test_mlp.model";
        save_mlp(m, path);
        const MlpModel r = load_mlp(path);
        CHECK(r.sizes == m.sizes);
        Rng rng(5);
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x(7);
            for (double& v : x) v = rng.uniform(-2.0, 2.0);
            CHECK(m.forward(x) == r.forward(x));
        }
    }

    SUBCASE("nnql lookups are identical on 1000 random queries") {
        NnqlStore store(6);
        LearningParams params;
        Rng rng(8);
        for (int i = 0; i < 300; ++i) {
            std::vector<double> s(6), s2(6);
            for (double& v : s) v = rng.unit();
            for (double& v : s2) v = rng.unit();
            store.q_update(s, static_cast<int>(rng.below(13)), rng.uniform(-1, 1), s2,
                           params);
        }
        const std::string path = dir + "/pgnav_test_nnql.model";
        save_nnql(store, path);
        const NnqlStore r = load_nnql(path);
        CHECK(r.size() == store.size());
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> q(6);
            for (double& v : q) v = rng.unit();
            const int a = static_cast<int>(rng.below(13));
            CHECK(store.q_lookup(q, a) == r.q_lookup(q, a));
        }
    }

    SUBCASE("classifier predictions survive the round trip") {
        std::vector<LabeledSample> samples;
        Rng rng(2);
        for (int i = 0; i < 40; ++i) {
            Eigen::VectorXd x(5);
            for (int j = 0; j < 5; ++j) x[j] = rng.unit();
            samples.push_back({x, static_cast<int>(rng.below(4))});
        }
        const PlaceClassifier c = train_classifier(Modality::tpv, 4, samples);
        const std::string path = dir + "/pgnav_test_clf.model";
        save_classifier(c, path);
        const PlaceClassifier r = load_classifier(path);
        CHECK(r.kind == c.kind);
        CHECK(r.weights == c.weights);
        CHECK(r.bias == c.bias);
        for (const auto& s : samples) CHECK(c.predict(s.features) == r.predict(s.features));
    }
}

TEST_CASE("model loader reports distinct failure modes") {
    const MlpModel m = MlpModel::init({3, 4, 4, 3}, 1);
    const std::string path = "/tmp/pgnav_test_err.model";
    save_mlp(m, path);

    auto slurp = [&] {
        std::ifstream in(path);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string good = slurp();

    SUBCASE("corrupted version header") {
        std::ofstream out(path);
        out << "pgnav-model 9" << good.substr(good.find('\n'));
        out.close();
        CHECK_THROWS_AS(load_mlp(path), ModelVersionError);
    }
    SUBCASE("wrong kind") {
        CHECK_THROWS_AS(load_nnql(path), ModelShapeError);
        CHECK_THROWS_AS(load_classifier(path), ModelShapeError);
    }
    SUBCASE("truncated payload") {
        std::ofstream out(path);
        out << good.substr(0, good.size() * 2 / 3);
        out.close();
        CHECK_THROWS_AS(load_mlp(path), ModelTruncatedError);
    }
}

TEST_CASE("base64 round trips arbitrary byte strings") {
    Rng rng(17);
    for (int len = 0; len < 64; ++len) {
        std::string bytes;
        for (int i = 0; i < len; ++i)
            bytes.push_back(static_cast<char>(rng.below(256)));
        CHECK(base64_decode(base64_encode(bytes)) == bytes);
    }
}

TEST_CASE("config files parse with flag overrides") {
    const std::string path = "/tmp/pgnav_test.cfg";
    {
        std::ofstream out(path);
        out << "# comment\n"
            << "workspace = data/ws0.wsp\n"
            << "seed = 17\n"
            << "goal-x = 8.25\n";
    }
    Config cfg;
    cfg.load_file(path);
    CHECK(cfg.get("workspace") == "data/ws0.wsp");
    CHECK(cfg.get_int("seed", 0) == 17);
    CHECK(cfg.get_double("goal-x", 0.0) == 8.25);

    const auto left = cfg.apply_args({"--seed", "99", "positional", "--extra", "x"});
    CHECK(cfg.get_int("seed", 0) == 99);
    CHECK(cfg.get("extra") == "x");
    CHECK(left == std::vector<std::string>{"positional"});
    CHECK_THROWS(cfg.apply_args({"--dangling"}));
    CHECK_THROWS(cfg.get("missing-key"));

    SUBCASE("output root comes from the environment when set") {
        setenv("PGNAV_OUTPUT_ROOT", "/tmp/pgnav_out", 1);
        CHECK(cfg.out_path("a.csv") == "/tmp/pgnav_out/a.csv");
        unsetenv("PGNAV_OUTPUT_ROOT");
        CHECK(cfg.out_path("a.csv") == "a.csv");
        cfg.set("out_dir", "/somewhere");
        CHECK(cfg.out_path("a.csv") == "/somewhere/a.csv");
        CHECK(cfg.out_path("/abs/path.csv") == "/abs/path.csv");
    }
}
