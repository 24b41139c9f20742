// Command-line front end for the point-goal-navigation distillation pipeline.
//
//   pgnav <subcommand> [--config file] [--key value ...]
//
// Subcommands: gen-workspace, train-classifiers, train-teacher, build-kd,
// distill, eval, report, dump-bev, dump-costs. Any config key can be
// overridden with a --key value flag; PGNAV_OUTPUT_ROOT overrides the output
// directory.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "pgnav/config.hpp"
#include "pgnav/distill.hpp"
#include "pgnav/evaluate.hpp"
#include "pgnav/genworkspace.hpp"
#include "pgnav/model_io.hpp"
#include "pgnav/oracle.hpp"
#include "pgnav/pipeline.hpp"
#include "pgnav/sensing.hpp"

namespace {

using namespace pgnav;

int usage() {
    std::cerr <<
        "usage: pgnav <subcommand> [--config file] [--key value ...]\n"
        "\n"
        "subcommands:\n"
        "  gen-workspace      --out ws.wsp --seed N [--width-m 10 --height-m 5\n"
        "                     --rooms 3 --corridor-m 0.9]\n"
        "  train-classifiers  --workspace ws.wsp --seed N [--samples-per-class 8]\n"
        "                     [--fpv-out fpv.model --tpv-out tpv.model]\n"
        "  train-teacher      --workspace ws.wsp --goal-x X --goal-y Y\n"
        "                     --fpv-classifier fpv.model --seed N\n"
        "                     [--teacher-episodes 5000] [--teacher-out teacher.model]\n"
        "  build-kd           --workspace ws.wsp --goal-x X --goal-y Y --seed N\n"
        "                     --teacher teacher.model --fpv-classifier fpv.model\n"
        "                     --tpv-classifier tpv.model [--kd-states 2000]\n"
        "                     [--kd-out kd.txt]\n"
        "  distill            --kd kd.txt --seed N [--epochs 100]\n"
        "                     [--student-out student.model]\n"
        "  eval               --workspace ws.wsp --goal-x X --goal-y Y --seed N\n"
        "                     --planner random|nnql|mlp [model flags as above]\n"
        "                     [--eval-episodes 500] [--csv-out eval.csv]\n"
        "  report             --summary-out summary.txt [--csv-out merged.csv]\n"
        "                     eval1.csv [eval2.csv ...]\n"
        "  dump-bev           --workspace ws.wsp --x X --y Y [--heading H]\n"
        "  dump-costs         --workspace ws.wsp --goal-x X --goal-y Y\n";
    return 2;
}

Pose goal_from(const Config& cfg) {
    return Pose{std::stod(cfg.get("goal-x")), std::stod(cfg.get("goal-y")), 0.0};
}

int cmd_gen_workspace(const Config& cfg) {
    GenParams params;
    params.width_m = cfg.get_double("width-m", params.width_m);
    params.height_m = cfg.get_double("height-m", params.height_m);
    params.rooms = static_cast<int>(cfg.get_int("rooms", params.rooms));
    params.corridor_width_m = cfg.get_double("corridor-m", params.corridor_width_m);
    params.seed = cfg.get_u64("seed", 0);
    const GridWorkspace w = generate_workspace(params);
    const std::string out = cfg.out_path(cfg.get("out"));
    write_workspace_file(w, out);
    std::cout << "wrote " << out << " (" << w.width_cells() << "x" << w.height_cells()
              << " cells, " << w.free_cell_count() << " free)\n";
    return 0;
}

int cmd_train_classifiers(const Config& cfg) {
    const GridWorkspace w = load_workspace_file(cfg.get("workspace"));
    const auto trained = train_classifiers(
        w, static_cast<int>(cfg.get_int("samples-per-class", 8)), cfg.get_u64("seed", 0));
    const std::string fpv_out = cfg.out_path(cfg.get("fpv-out", "fpv.model"));
    const std::string tpv_out = cfg.out_path(cfg.get("tpv-out", "tpv.model"));
    save_classifier(trained.fpv, fpv_out);
    save_classifier(trained.tpv, tpv_out);
    std::printf("fpv: %s (train accuracy %.4f)\n", fpv_out.c_str(),
                trained.fpv_train_accuracy);
    std::printf("tpv: %s (train accuracy %.4f)\n", tpv_out.c_str(),
                trained.tpv_train_accuracy);
    return 0;
}

int cmd_train_teacher(const Config& cfg) {
    const GridWorkspace w = load_workspace_file(cfg.get("workspace"));
    const PlaceClassifier fpv = load_classifier(cfg.get("fpv-classifier"));
    const CostField cost_field = build_cost_field(w, goal_from(cfg));
    TeacherTrainConfig tc;
    tc.episodes = static_cast<int>(cfg.get_int("teacher-episodes", tc.episodes));
    Rng rng(cfg.get_u64("seed", 0));
    const NnqlStore store = train_teacher(w, cost_field, fpv, tc, rng);
    const std::string out = cfg.out_path(cfg.get("teacher-out", "teacher.model"));
    save_nnql(store, out);
    std::cout << "wrote " << out << " (" << store.size() << " entries)\n";
    return 0;
}

int cmd_build_kd(const Config& cfg) {
    const GridWorkspace w = load_workspace_file(cfg.get("workspace"));
    const NnqlStore teacher = load_nnql(cfg.get("teacher"));
    const PlaceClassifier fpv = load_classifier(cfg.get("fpv-classifier"));
    const PlaceClassifier tpv = load_classifier(cfg.get("tpv-classifier"));
    KdBuildConfig kc;
    kc.n_states = static_cast<int>(cfg.get_int("kd-states", kc.n_states));
    Rng rng(cfg.get_u64("seed", 0));
    const auto dataset = build_kd_dataset(w, goal_from(cfg), teacher, fpv, tpv, kc, rng);
    const std::string out = cfg.out_path(cfg.get("kd-out", "kd.txt"));
    write_kd_dataset_file(dataset, out);
    std::cout << "wrote " << out << " (" << dataset.size() << " merged samples)\n";
    return 0;
}

int cmd_distill(const Config& cfg) {
    const auto dataset = read_kd_dataset_file(cfg.get("kd"));
    DistillConfig dc;
    dc.max_epochs = static_cast<int>(cfg.get_int("epochs", dc.max_epochs));
    const std::uint64_t seed = cfg.get_u64("seed", 0);
    Rng rng(derive_seed(seed, 402));
    MlpModel m = distill(dataset, MlpModel::student(derive_seed(seed, 401)), dc, rng);
    const std::string out = cfg.out_path(cfg.get("student-out", "student.model"));
    save_mlp(m, out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_eval(const Config& cfg) {
    const GridWorkspace w = load_workspace_file(cfg.get("workspace"));
    const Pose goal = goal_from(cfg);
    const std::string planner_id = cfg.get("planner");
    Planner planner;
    if (planner_id == "random") {
        planner = make_random_planner();
    } else if (planner_id == "nnql") {
        planner = make_teacher_planner(
            std::make_shared<NnqlStore>(load_nnql(cfg.get("teacher"))),
            std::make_shared<PlaceClassifier>(load_classifier(cfg.get("fpv-classifier"))));
    } else if (planner_id == "mlp") {
        planner = make_student_planner(
            std::make_shared<MlpModel>(load_mlp(cfg.get("student"))),
            std::make_shared<PlaceClassifier>(load_classifier(cfg.get("tpv-classifier"))));
    } else {
        std::cerr << "unknown planner: " << planner_id << "\n";
        return 2;
    }
    const int episodes = static_cast<int>(cfg.get_int("eval-episodes", 500));
    const std::string ws_id = cfg.get("workspace-id", cfg.get("workspace"));
    const EvalResult result = evaluate(w, goal, planner, episodes,
                                       cfg.get_u64("seed", 0), ws_id, planner_id);
    const std::string out = cfg.out_path(cfg.get("csv-out", "eval.csv"));
    std::ofstream os(out);
    write_episode_csv({result}, os);
    std::printf("%s %s: achievement rate %.2f%% -> %s\n", ws_id.c_str(), planner_id.c_str(),
                100.0 * result.achievement_rate(), out.c_str());
    return 0;
}

int cmd_report(const Config& cfg, const std::vector<std::string>& csv_paths) {
    if (csv_paths.empty()) {
        std::cerr << "report: no episode CSVs given\n";
        return 2;
    }
    std::vector<EvalResult> all;
    for (const auto& path : csv_paths) {
        std::ifstream in(path);
        if (!in) {
            std::cerr << "cannot open " << path << "\n";
            return 2;
        }
        for (auto& r : read_episode_csv(in)) all.push_back(std::move(r));
    }
    const std::string merged = cfg.out_path(cfg.get("csv-out", "episodes.csv"));
    {
        std::ofstream os(merged);
        write_episode_csv(all, os);
    }
    const std::string summary = cfg.out_path(cfg.get("summary-out", "summary.txt"));
    {
        std::ofstream os(summary);
        write_summary(all, os);
    }
    std::ifstream echo(summary);
    std::cout << echo.rdbuf();
    std::cout << "wrote " << merged << " and " << summary << "\n";
    return 0;
}

int cmd_dump_bev(const Config& cfg) {
    const GridWorkspace w = load_workspace_file(cfg.get("workspace"));
    const Pose p{std::stod(cfg.get("x")), std::stod(cfg.get("y")),
                 cfg.get_double("heading", 0.0)};
    std::cout << render_bev_raster(w, p);
    return 0;
}

int cmd_dump_costs(const Config& cfg) {
    const GridWorkspace w = load_workspace_file(cfg.get("workspace"));
    const CostField cf = build_cost_field(w, goal_from(cfg));
    for (int row = 0; row < w.height_cells(); ++row) {
        const int cy = w.height_cells() - 1 - row;
        for (int cx = 0; cx < w.width_cells(); ++cx) {
            const double c = cf.cost_cell(cx, cy);
            if (cx) std::cout << ' ';
            if (std::isfinite(c)) std::printf("%.3f", c);
            else std::cout << "inf";
        }
        std::cout << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) return usage();
    const std::string cmd = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);

    Config cfg;
    try {
        // Pull out --config first so flags override file values.
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--config") {
                cfg.load_file(args[i + 1]);
                args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                           args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
                break;
            }
        }
        const std::vector<std::string> positional = cfg.apply_args(args);

        if (cmd == "gen-workspace") return cmd_gen_workspace(cfg);
        if (cmd == "train-classifiers") return cmd_train_classifiers(cfg);
        if (cmd == "train-teacher") return cmd_train_teacher(cfg);
        if (cmd == "build-kd") return cmd_build_kd(cfg);
        if (cmd == "distill") return cmd_distill(cfg);
        if (cmd == "eval") return cmd_eval(cfg);
        if (cmd == "report") return cmd_report(cfg, positional);
        if (cmd == "dump-bev") return cmd_dump_bev(cfg);
        if (cmd == "dump-costs") return cmd_dump_costs(cfg);
        std::cerr << "unknown subcommand: " << cmd << "\n";
        return usage();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
