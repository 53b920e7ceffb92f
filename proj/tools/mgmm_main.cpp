#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mgmm/harness.hpp"
#include "mgmm/memory.hpp"
#include "mgmm/planner.hpp"
#include "mgmm/world.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

mgmm::RobotModel make_robot(const std::string& kind, const std::string& config_path) {
  mgmm::RobotModel model = mgmm::robot_kind_from_string(kind) == mgmm::RobotModel::Kind::car
                               ? mgmm::RobotModel::car()
                               : mgmm::RobotModel::snake();
  if (!config_path.empty()) {
    const json j = json::parse(read_file(config_path));
    if (j.contains("dynamics")) {
      const auto& d = j.at("dynamics");
      model.wheelbase = d.value("L", model.wheelbase);
      model.hitch = d.value("H", model.hitch);
      model.trailers = d.value("N", model.trailers);
    }
  }
  return model;
}

double config_dt(const std::string& config_path, double fallback) {
  if (config_path.empty()) return fallback;
  const json j = json::parse(read_file(config_path));
  if (j.contains("dynamics")) return j.at("dynamics").value("dt", fallback);
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-goal motion planning with per-goal-pair experience retrieval"};
  app.require_subcommand(1);

  // ---- gen-scenes ----
  auto* gen = app.add_subcommand("gen-scenes", "generate problem scenes");
  std::string gen_class = "random", gen_layout = "2x2", gen_out = "scenes";
  int gen_count = 10;
  uint64_t gen_seed_base = 100;
  gen->add_option("--class", gen_class, "scene class: random|curve|maze|storage");
  gen->add_option("--layout", gen_layout, "goal layout: 2x2|3x3|4x4");
  gen->add_option("--count", gen_count, "number of scenes");
  gen->add_option("--seed-base", gen_seed_base, "first seed; scene i uses seed-base+i");
  gen->add_option("--out", gen_out, "output directory");

  // ---- train ----
  auto* train = app.add_subcommand("train", "train a memory store from scenes");
  std::string train_scenes, train_out = "store.mm", train_pairs = "all";
  std::string train_robot = "car", train_config;
  int train_aug = 25, train_epochs = 30, train_grid = 32;
  double train_margin = 0.5, train_lr = 1e-3;
  uint64_t train_seed = 1;
  train->add_option("--scenes", train_scenes, "directory of original scene JSONs")->required();
  train->add_option("--pairs", train_pairs, "goal pairs to train ('all')");
  train->add_option("--out", train_out, "output store path");
  train->add_option("--robot", train_robot, "car|snake");
  train->add_option("--augment", train_aug, "augmented environments per original");
  train->add_option("--epochs", train_epochs, "training epochs per pair");
  train->add_option("--margin", train_margin, "triplet margin");
  train->add_option("--lr", train_lr, "learning rate");
  train->add_option("--grid", train_grid, "occupancy grid resolution");
  train->add_option("--seed", train_seed, "training seed");
  train->add_option("--config", train_config, "JSON config with dynamics overrides");

  // ---- plan ----
  auto* plan = app.add_subcommand("plan", "plan one instance");
  std::string plan_scene, plan_robot = "car", plan_planner = "memory";
  std::string plan_store, plan_out = "result.json", plan_svg, plan_map_dump, plan_config;
  double plan_budget = 10.0;
  uint64_t plan_seed = 1;
  int plan_start_goal = -1;
  plan->add_option("--scene", plan_scene, "scene JSON file")->required();
  plan->add_option("--robot", plan_robot, "car|snake");
  plan->add_option("--planner", plan_planner, "memory|dromos|seqrrt");
  plan->add_option("--store", plan_store, "memory store (memory planner)");
  plan->add_option("--budget", plan_budget, "budget in seconds");
  plan->add_option("--seed", plan_seed, "instance seed");
  plan->add_option("--out", plan_out, "result JSON path");
  plan->add_option("--svg", plan_svg, "trajectory SVG path");
  plan->add_option("--dump-map", plan_map_dump, "debug motion-map JSON path");
  plan->add_option("--start-goal", plan_start_goal, "start at this goal index");
  plan->add_option("--config", plan_config, "JSON config with dynamics overrides");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "run a benchmark config");
  std::string bench_config, bench_out = "report.csv";
  bench->add_option("--config", bench_config, "benchmark config JSON")->required();
  bench->add_option("--out", bench_out, "report CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto cls = mgmm::scene_class_from_string(gen_class);
      const auto layout = mgmm::layout_from_string(gen_layout);
      fs::create_directories(gen_out);
      for (int i = 0; i < gen_count; ++i) {
        const uint64_t seed = gen_seed_base + static_cast<uint64_t>(i);
        const mgmm::Scene scene = mgmm::generate_scene(cls, layout, seed);
        const fs::path path = fs::path(gen_out) / (scene.id + ".json");
        mgmm::save_scene(scene, path.string());
      }
      std::cout << "wrote " << gen_count << " scenes to " << gen_out << "\n";
    }

    if (*train) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(train_scenes)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw std::runtime_error("no scene files in " + train_scenes);
      std::vector<mgmm::Scene> originals;
      for (const auto& f : files) originals.push_back(mgmm::load_scene(f.string()));

      // class and layout come from the generated scene ids: <class>-<layout>-s<seed>
      const std::string& id = originals.front().id;
      const auto dash1 = id.find('-');
      const auto dash2 = id.find('-', dash1 + 1);
      if (dash1 == std::string::npos || dash2 == std::string::npos) {
        throw std::runtime_error("scene id does not encode class/layout: " + id);
      }
      const auto cls = mgmm::scene_class_from_string(id.substr(0, dash1));
      const auto layout = mgmm::layout_from_string(id.substr(dash1 + 1, dash2 - dash1 - 1));
      if (train_pairs != "all") {
        throw std::runtime_error("only --pairs all is supported");
      }

      mgmm::ExperienceConfig cfg;
      cfg.originals = static_cast<int>(originals.size());
      cfg.augmentations = train_aug;
      cfg.grid_resolution = train_grid;
      cfg.seed = train_seed;
      cfg.train.margin = train_margin;
      cfg.train.lr = train_lr;
      cfg.train.epochs = train_epochs;

      const mgmm::RobotModel model = make_robot(train_robot, train_config);
      const auto t0 = std::chrono::steady_clock::now();
      mgmm::TrainedStore trained = mgmm::train_store(originals, cls, layout, model, cfg);
      const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
      trained.store.save(train_out);
      std::cout << "trained " << trained.store.pairs.size() << " pairs in " << dt.count()
                << " s (" << trained.skipped_plans << " skipped plans), wrote "
                << train_out << "\n";
    }

    if (*plan) {
      const mgmm::Scene scene = mgmm::load_scene(plan_scene);
      const mgmm::RobotModel model = make_robot(plan_robot, plan_config);
      mgmm::PlannerParams params;
      params.budget_s = plan_budget;
      params.seed = plan_seed;
      params.dt = config_dt(plan_config, params.dt);

      mgmm::RobotState start = mgmm::instance_start(scene, model, plan_seed);
      if (plan_start_goal >= 0) {
        const auto& g = scene.goals.at(static_cast<size_t>(plan_start_goal));
        start.x = g.center.x;
        start.y = g.center.y;
      }

      mgmm::PlanResult result;
      const auto wall0 = std::chrono::steady_clock::now();
      if (plan_planner == "memory") {
        if (plan_store.empty()) throw std::runtime_error("memory planner needs --store");
        const mgmm::MemoryStore store = mgmm::MemoryStore::load(plan_store);
        if (store.robot != mgmm::to_string(model.kind)) {
          std::cerr << "note: store trained for " << store.robot << ", planning for "
                    << mgmm::to_string(model.kind) << "\n";
        }
        result = mgmm::plan_memory_guided(scene, model, start, store, params);
      } else if (plan_planner == "dromos") {
        result = mgmm::plan_baseline_roadmap(scene, model, start, params);
      } else if (plan_planner == "seqrrt") {
        result = mgmm::plan_sequential_rrt(scene, model, start, params);
      } else {
        throw std::runtime_error("unknown planner: " + plan_planner);
      }
      const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0);

      write_file(plan_out, mgmm::result_to_json(result, scene, model));
      if (!plan_svg.empty() && result.status == mgmm::PlanStatus::solved) {
        write_file(plan_svg, mgmm::plot_trajectory(scene, result));
      }
      if (!plan_map_dump.empty() && plan_planner == "memory") {
        // Re-derive the guided map for inspection.
        const mgmm::MemoryStore store = mgmm::MemoryStore::load(plan_store);
        const auto query = mgmm::call_memory(store, scene, start.position());
        mgmm::MapParams mp;
        mp.inflate = model.circumradius();
        mgmm::Rng rng = mgmm::Rng(plan_seed).fork(0x6d6170);
        const auto map = mgmm::generate_motion_map(scene, start.position(), query.paths, mp, rng);
        write_file(plan_map_dump, mgmm::map_to_json(map));
      }
      std::cout << (result.status == mgmm::PlanStatus::solved ? "solved" : "timeout")
                << " runtime_s=" << result.runtime_s << " distance_m=" << result.distance_m
                << " tree_nodes=" << result.tree_nodes << " groups=" << result.groups
                << " wall_s=" << wall.count() << "\n";
    }

    if (*bench) {
      const mgmm::BenchmarkConfig cfg = mgmm::benchmark_config_from_json(read_file(bench_config));
      const mgmm::BenchmarkReport report = mgmm::run_benchmark(cfg);
      const auto now = std::chrono::system_clock::now();
      const auto t = std::chrono::system_clock::to_time_t(now);
      char stamp[64];
      std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
      write_file(bench_out, mgmm::report_to_csv(report, stamp));
      for (const auto& c : report.cells) {
        std::cout << c.scene_class << "/" << c.layout << " " << c.planner
                  << ": success=" << c.success_rate
                  << " runtime=" << c.trimmed_runtime_s
                  << " distance=" << c.trimmed_distance_m << "\n";
      }
      std::cout << "wrote " << bench_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
