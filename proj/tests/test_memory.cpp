#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "mgmm/harness.hpp"
#include "mgmm/memory.hpp"
#include "mgmm/rng.hpp"

using namespace mgmm;

namespace {

Eigen::VectorXd random_embedding(Rng& rng, int dim = 16) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

/// Synthetic separable clusters: block grids with one quadrant filled and a
/// few noise cells.
std::vector<std::vector<Eigen::VectorXd>> quadrant_clusters(int res, int per_cluster,
                                                            Rng& rng) {
  std::vector<std::vector<Eigen::VectorXd>> clusters;
  for (int q = 0; q < 4; ++q) {
    std::vector<Eigen::VectorXd> members;
    for (int k = 0; k < per_cluster; ++k) {
      Eigen::VectorXd grid = Eigen::VectorXd::Zero(res * res);
      const int r0 = (q / 2) * res / 2;
      const int c0 = (q % 2) * res / 2;
      for (int r = r0; r < r0 + res / 2; ++r) {
        for (int c = c0; c < c0 + res / 2; ++c) grid[r * res + c] = 1.0;
      }
      for (int noise = 0; noise < res; ++noise) {
        grid[static_cast<long>(rng.index(static_cast<size_t>(res * res)))] =
            rng.chance(0.5) ? 1.0 : 0.0;
      }
      members.push_back(grid);
    }
    clusters.push_back(std::move(members));
  }
  return clusters;
}

Trajectory straight_plan(Vec2 a, Vec2 b) {
  // Geometry-only stand-in plan for store bookkeeping tests.
  Trajectory t;
  const int steps = 40;
  for (int i = 0; i <= steps; ++i) {
    RobotState s;
    s.x = a.x + (b.x - a.x) * i / steps;
    s.y = a.y + (b.y - a.y) * i / steps;
    t.states.push_back(s);
    if (i < steps) t.actions.push_back({});
  }
  return t;
}

}  // namespace

TEST_CASE("triplet loss at the exact margin is zero") {
  Rng rng(3);
  const Eigen::VectorXd a = random_embedding(rng);
  Eigen::VectorXd d = a;
  d[0] += 0.5;  // ||a - d|| = margin, ||a - s|| = 0
  const TripletResult r = triplet_loss(a, a, d, 0.5);
  CHECK(r.loss == doctest::Approx(0.0));
  CHECK(r.d_anchor.norm() == doctest::Approx(0.0));
}

TEST_CASE("triplet loss at the worst ordering") {
  Rng rng(5);
  const Eigen::VectorXd a = random_embedding(rng);
  Eigen::VectorXd s = a;
  s[1] += 1.0;  // ||a - s|| = 1, ||a - d|| = 0
  const TripletResult r = triplet_loss(a, s, a, 0.5);
  CHECK(r.loss == doctest::Approx(1.5));
}

TEST_CASE("triplet loss is nonnegative and zero implies the margin holds") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const Eigen::VectorXd a = random_embedding(rng);
    const Eigen::VectorXd s = random_embedding(rng);
    const Eigen::VectorXd d = random_embedding(rng);
    const TripletResult r = triplet_loss(a, s, d, 0.5);
    CHECK(r.loss >= 0.0);
    if (r.loss == 0.0) {
      CHECK((a - s).norm() + 0.5 <= (a - d).norm() + 1e-12);
    }
  }
}

TEST_CASE("triplet gradients match central finite differences") {
  Rng rng(9);
  const double h = 1e-6;
  int tested = 0;
  while (tested < 100) {
    Eigen::VectorXd a = random_embedding(rng);
    Eigen::VectorXd s = random_embedding(rng);
    Eigen::VectorXd d = random_embedding(rng);
    const TripletResult r = triplet_loss(a, s, d, 0.5);
    const double gap = (a - s).norm() - (a - d).norm() + 0.5;
    if (std::fabs(gap) < 1e-3) continue;  // keep clear of the hinge kink
    ++tested;
    Eigen::VectorXd* vecs[3] = {&a, &s, &d};
    const Eigen::VectorXd* grads[3] = {&r.d_anchor, &r.d_similar, &r.d_dissimilar};
    for (int which = 0; which < 3; ++which) {
      for (int k = 0; k < a.size(); k += 5) {
        const double orig = (*vecs[which])[k];
        (*vecs[which])[k] = orig + h;
        const double up = triplet_loss(a, s, d, 0.5).loss;
        (*vecs[which])[k] = orig - h;
        const double down = triplet_loss(a, s, d, 0.5).loss;
        (*vecs[which])[k] = orig;
        const double fd = (up - down) / (2.0 * h);
        const double an = (*grads[which])[k];
        const double scale = std::max({std::fabs(fd), std::fabs(an), 1e-6});
        CHECK(std::fabs(fd - an) / scale < 1e-5);
      }
    }
  }
}

TEST_CASE("training refuses degenerate datasets") {
  TrainConfig cfg;
  std::vector<std::vector<Eigen::VectorXd>> one_cluster(1);
  one_cluster[0] = {Eigen::VectorXd::Zero(16), Eigen::VectorXd::Ones(16)};
  CHECK_THROWS_AS(train_encoder(one_cluster, 16, cfg), std::invalid_argument);

  std::vector<std::vector<Eigen::VectorXd>> thin(2);
  thin[0] = {Eigen::VectorXd::Zero(16), Eigen::VectorXd::Ones(16)};
  thin[1] = {Eigen::VectorXd::Ones(16)};
  CHECK_THROWS_AS(train_encoder(thin, 16, cfg), std::invalid_argument);
}

TEST_CASE("training is deterministic per seed") {
  Rng rng(13);
  const auto clusters = quadrant_clusters(8, 6, rng);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 99;
  const Encoder a = train_encoder(clusters, 64, cfg);
  const Encoder b = train_encoder(clusters, 64, cfg);
  CHECK(a.w1_ == b.w1_);
  CHECK(a.w2_ == b.w2_);
  CHECK(a.w3_ == b.w3_);
  CHECK(a.b3_ == b.b3_);
}

TEST_CASE("loss drops by 10x on separable synthetic clusters") {
  Rng rng(15);
  const auto clusters = quadrant_clusters(8, 10, rng);
  TrainConfig cfg;
  cfg.seed = 5;
  TrainReport report;
  train_encoder(clusters, 64, cfg, &report);
  REQUIRE(report.epoch_loss.size() == static_cast<size_t>(cfg.epochs));
  CHECK(report.epoch_loss.back() < 0.1 * report.epoch_loss.front());
}

TEST_CASE("embeddings are unit norm and holdout maps to its own cluster") {
  Rng rng(17);
  auto clusters = quadrant_clusters(8, 12, rng);
  std::vector<std::vector<Eigen::VectorXd>> holdout(4);
  for (int q = 0; q < 4; ++q) {
    holdout[static_cast<size_t>(q)].assign(clusters[static_cast<size_t>(q)].end() - 3,
                                           clusters[static_cast<size_t>(q)].end());
    clusters[static_cast<size_t>(q)].resize(clusters[static_cast<size_t>(q)].size() - 3);
  }
  TrainConfig cfg;
  cfg.seed = 21;
  const Encoder enc = train_encoder(clusters, 64, cfg);

  std::vector<Eigen::VectorXd> centroids;
  for (const auto& members : clusters) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(enc.embed_dim());
    for (const auto& g : members) {
      const Eigen::VectorXd e = enc.embed(g);
      CHECK(e.norm() == doctest::Approx(1.0).epsilon(1e-9));
      c += e;
    }
    centroids.push_back(c / static_cast<double>(members.size()));
  }
  int correct = 0, total = 0;
  for (int q = 0; q < 4; ++q) {
    for (const auto& g : holdout[static_cast<size_t>(q)]) {
      const Eigen::VectorXd e = enc.embed(g);
      int best = 0;
      for (size_t i = 1; i < centroids.size(); ++i) {
        if ((e - centroids[i]).norm() < (e - centroids[static_cast<size_t>(best)]).norm()) {
          best = static_cast<int>(i);
        }
      }
      ++total;
      if (best == q) ++correct;
    }
  }
  CHECK(static_cast<double>(correct) / total >= 0.7);
}

TEST_CASE("retrieval argmin is invariant to common scaling") {
  Rng rng(19);
  const Eigen::VectorXd e = random_embedding(rng);
  std::vector<Eigen::VectorXd> centroids;
  for (int i = 0; i < 5; ++i) centroids.push_back(random_embedding(rng));
  const auto argmin = [&](double scale) {
    int best = 0;
    for (size_t i = 1; i < centroids.size(); ++i) {
      if ((e * scale - centroids[i] * scale).norm() <
          (e * scale - centroids[static_cast<size_t>(best)] * scale).norm()) {
        best = static_cast<int>(i);
      }
    }
    return best;
  };
  const int base = argmin(1.0);
  CHECK(argmin(0.01) == base);
  CHECK(argmin(137.0) == base);
}

TEST_CASE("retrieve breaks centroid ties toward the lower index") {
  MemoryStore store;
  store.grid_resolution = 4;
  store.n_goals = 2;
  PairMemory mem;
  mem.encoder = Encoder(16, 7);
  const Eigen::VectorXd probe = mem.encoder.embed(Eigen::VectorXd::Zero(16));
  Eigen::VectorXd off = probe;
  off[0] += 0.3;
  mem.centroids = {off, off};  // exactly equidistant from the probe
  mem.plans = {straight_plan({0, 0}, {1, 0}), straight_plan({0, 0}, {0, 1})};
  store.pairs.emplace(std::make_pair(0, 1), std::move(mem));

  OccupancyGrid grid;
  grid.resolution = 4;
  grid.cells.assign(16, 0);
  const Retrieval r = retrieve(store, {0, 1}, grid);
  CHECK(r.cluster == 0);
  CHECK(r.plan.states.back().y == doctest::Approx(0.0));
}

TEST_CASE("retrieve reports the plan arc length as the distance") {
  MemoryStore store;
  store.grid_resolution = 4;
  store.n_goals = 2;
  PairMemory mem;
  mem.encoder = Encoder(16, 7);
  mem.centroids = {Eigen::VectorXd::Zero(16)};
  mem.plans = {straight_plan({2, 3}, {8, 11})};
  store.pairs.emplace(std::make_pair(0, 1), std::move(mem));
  OccupancyGrid grid;
  grid.resolution = 4;
  grid.cells.assign(16, 0);
  const Retrieval r = retrieve(store, {0, 1}, grid);
  CHECK(r.dis == doctest::Approx(10.0));
}

TEST_CASE("retrieve names the missing pair") {
  MemoryStore store;
  store.grid_resolution = 4;
  OccupancyGrid grid;
  grid.resolution = 4;
  grid.cells.assign(16, 0);
  CHECK_THROWS_WITH_AS(retrieve(store, {3, 4}, grid), doctest::Contains("(3, 4)"),
                       std::runtime_error);
}

namespace {

MemoryStore tiny_trained_store(GoalLayout layout, uint64_t seed) {
  std::vector<Scene> scenes;
  for (int i = 0; i < 4; ++i) {
    scenes.push_back(generate_scene(SceneClass::random, layout, seed + static_cast<uint64_t>(i)));
  }
  ExperienceConfig cfg;
  cfg.originals = 4;
  cfg.augmentations = 3;
  cfg.train.epochs = 2;
  cfg.seed = seed;
  return train_store(scenes, SceneClass::random, layout, RobotModel::car(), cfg).store;
}

}  // namespace

TEST_CASE("call_memory covers start legs and keeps costs consistent") {
  const MemoryStore store = tiny_trained_store(GoalLayout::grid2x2, 500);
  const Scene scene = generate_scene(SceneClass::random, GoalLayout::grid2x2, 700);
  const Vec2 start = scene.goals[0].center;
  const MemoryQuery q = call_memory(store, scene, start);

  const int n = static_cast<int>(scene.goals.size());
  CHECK(q.paths.size() == static_cast<size_t>(n * (n - 1) + n));
  for (int j = 1; j < n; ++j) {
    CHECK(q.paths.at({-1, j}) == q.paths.at({0, j}));
    CHECK(q.costs.at(0, j + 1) == q.costs.at(1, j + 1));
  }
  CHECK(q.paths.at({-1, 0}).size() == 1);
  for (int i = 0; i < q.costs.side(); ++i) CHECK(q.costs.at(i, i) == 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      CHECK(q.costs.at(i + 1, j + 1) ==
            doctest::Approx(polyline_length(q.paths.at({i, j}))).epsilon(1e-12));
    }
  }
}

TEST_CASE("call_memory rejects starts outside every goal region") {
  const MemoryStore store = tiny_trained_store(GoalLayout::grid2x2, 520);
  const Scene scene = generate_scene(SceneClass::random, GoalLayout::grid2x2, 720);
  CHECK_THROWS_AS(call_memory(store, scene, {1.0, 1.0}), std::runtime_error);
}

TEST_CASE("augmenting an empty scene copies it") {
  Scene scene;
  scene.bounds = {0.0, 0.0, 30.0, 30.0};
  scene.goals = layout_goals(GoalLayout::grid2x2);
  const Trajectory plan = straight_plan(scene.goals[0].center, scene.goals[1].center);
  Rng rng(23);
  const auto out = augment(scene, RobotModel::car(), plan, 5, AugmentParams{}, rng);
  CHECK(out.size() == 5);
  for (const auto& s : out) CHECK(s.obstacles.empty());
}

TEST_CASE("augmented scenes keep the plan collision-free") {
  const Scene scene = generate_scene(SceneClass::random, GoalLayout::grid2x2, 811);
  const RobotModel car = RobotModel::car();
  const auto plan = plan_pair_experience(scene, car, 0, 3);
  REQUIRE(plan.has_value());
  Rng rng(25);
  const auto out = augment(scene, car, *plan, 10, AugmentParams{}, rng);
  CHECK(out.size() == 10);
  int moved = 0;
  for (const auto& s : out) {
    CHECK(trajectory_collision_free(s, car, *plan));
    CHECK(s.obstacles.size() == scene.obstacles.size());
    for (size_t i = 0; i < s.obstacles.size(); ++i) {
      if (distance(s.obstacles[i].center, scene.obstacles[i].center) > 1e-12) ++moved;
    }
  }
  CHECK(moved > 0);
}

TEST_CASE("store serialization round-trips bit-exactly") {
  const MemoryStore store = tiny_trained_store(GoalLayout::grid2x2, 540);
  const std::string path = (std::filesystem::temp_directory_path() / "mgmm_store_test.mm").string();
  store.save(path);
  const MemoryStore loaded = MemoryStore::load(path);
  std::remove(path.c_str());

  CHECK(loaded.grid_resolution == store.grid_resolution);
  CHECK(loaded.layout == store.layout);
  CHECK(loaded.robot == store.robot);
  REQUIRE(loaded.pairs.size() == store.pairs.size());

  const Scene scene = generate_scene(SceneClass::random, GoalLayout::grid2x2, 740);
  Rng rng(27);
  for (int i = 0; i < 100; ++i) {
    Scene jittered = scene;
    for (auto& o : jittered.obstacles) {
      o.center.x = std::clamp(o.center.x + rng.uniform(-0.4, 0.4), o.hw, 30.0 - o.hw);
      o.center.y = std::clamp(o.center.y + rng.uniform(-0.4, 0.4), o.hh, 30.0 - o.hh);
    }
    const OccupancyGrid grid = rasterize(jittered, store.grid_resolution);
    const int a = static_cast<int>(rng.index(4));
    int b = static_cast<int>(rng.index(3));
    if (b >= a) ++b;
    const Retrieval ra = retrieve(store, {a, b}, grid);
    const Retrieval rb = retrieve(loaded, {a, b}, grid);
    CHECK(ra.cluster == rb.cluster);
    CHECK(ra.dis == rb.dis);
    REQUIRE(ra.plan.states.size() == rb.plan.states.size());
  }
}

TEST_CASE("centroids are recomputable from the training grids") {
  std::vector<Scene> scenes;
  for (int i = 0; i < 3; ++i) {
    scenes.push_back(generate_scene(SceneClass::random, GoalLayout::grid2x2,
                                    560 + static_cast<uint64_t>(i)));
  }
  const RobotModel car = RobotModel::car();
  PairExperience exp;
  Rng rng(29);
  for (const auto& scene : scenes) {
    auto plan = plan_pair_experience(scene, car, 0, 1);
    REQUIRE(plan.has_value());
    Rng aug_rng = rng.fork(exp.clusters.size());
    auto augs = augment(scene, car, *plan, 3, AugmentParams{}, aug_rng);
    PairExperience::Cluster cluster;
    cluster.plan = *plan;
    cluster.grids.push_back(rasterize(scene, 32));
    for (const auto& s : augs) cluster.grids.push_back(rasterize(s, 32));
    exp.clusters.push_back(std::move(cluster));
  }
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 31;
  const PairMemory mem = build_pair_memory(exp, 32, cfg);
  for (size_t i = 0; i < exp.clusters.size(); ++i) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(mem.encoder.embed_dim());
    for (const auto& g : exp.clusters[i].grids) c += mem.encoder.embed(grid_to_input(g));
    c /= static_cast<double>(exp.clusters[i].grids.size());
    CHECK((c - mem.centroids[i]).norm() < 1e-9);
  }
}
