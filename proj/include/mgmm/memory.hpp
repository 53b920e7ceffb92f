#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mgmm/dynamics.hpp"
#include "mgmm/motionmap.hpp"
#include "mgmm/rng.hpp"
#include "mgmm/tour.hpp"
#include "mgmm/world.hpp"

namespace mgmm {

/// Dense encoder from a flattened occupancy grid to a unit-norm embedding:
/// input -> 128 -> 64 -> 16 with max(0, .) activations. Forward passes are
/// deterministic; gradients are computed by hand in the trainer.
class Encoder {
 public:
  Encoder() = default;
  Encoder(int input_dim, uint64_t seed);

  Eigen::VectorXd embed(const Eigen::VectorXd& grid) const;
  /// Batched forward, one column per grid.
  Eigen::MatrixXd embed_batch(const Eigen::MatrixXd& grids) const;

  int input_dim() const { return static_cast<int>(w1_.cols()); }
  int embed_dim() const { return static_cast<int>(w3_.rows()); }

  // Layer access for the trainer and for serialization.
  Eigen::MatrixXd w1_, w2_, w3_;
  Eigen::VectorXd b1_, b2_, b3_;

  static constexpr int kHidden1 = 128;
  static constexpr int kHidden2 = 64;
  static constexpr int kEmbed = 16;
};

Eigen::VectorXd grid_to_input(const OccupancyGrid& grid);

struct TripletResult {
  double loss = 0.0;
  Eigen::VectorXd d_anchor, d_similar, d_dissimilar;
};

/// max(||a - s|| - ||a - d|| + margin, 0) with gradients w.r.t. all three
/// embeddings; gradients are zero when the hinge is inactive.
TripletResult triplet_loss(const Eigen::VectorXd& anchor,
                           const Eigen::VectorXd& similar,
                           const Eigen::VectorXd& dissimilar, double margin);

struct TrainConfig {
  double margin = 0.5;
  double lr = 1e-3;
  int epochs = 30;
  int batch = 32;
  uint64_t seed = 1;
};

struct TrainReport {
  std::vector<double> epoch_loss;
};

/// Trains an encoder on clustered grids (one cluster per stored plan) by SGD
/// over sampled triplets. Throws on degenerate datasets (fewer than two
/// clusters, or a cluster with fewer than two members).
Encoder train_encoder(const std::vector<std::vector<Eigen::VectorXd>>& clusters,
                      int input_dim, const TrainConfig& cfg, TrainReport* report = nullptr);

/// Experience for one goal pair: each cluster couples one stored plan with
/// the environments (original + augmentations) where that plan holds.
struct PairExperience {
  struct Cluster {
    Trajectory plan;
    std::vector<OccupancyGrid> grids;
  };
  std::vector<Cluster> clusters;
};

struct PairMemory {
  Encoder encoder;
  std::vector<Eigen::VectorXd> centroids;
  std::vector<Trajectory> plans;
};

/// Trained memory for one (scene class, goal layout, robot): per ordered
/// goal pair, an encoder, cluster centroids, and the stored plans.
struct MemoryStore {
  static constexpr uint32_t kVersion = 1;

  int grid_resolution = 32;
  int n_goals = 0;
  std::string layout;
  std::string scene_class;
  std::string robot;
  std::map<std::pair<int, int>, PairMemory> pairs;

  void save(const std::string& path) const;
  static MemoryStore load(const std::string& path);
};

/// Builds one pair's memory from experience: trains the encoder and computes
/// each cluster centroid as the mean of its training embeddings.
PairMemory build_pair_memory(const PairExperience& exp, int grid_resolution,
                             const TrainConfig& cfg, TrainReport* report = nullptr);

struct Retrieval {
  int cluster = -1;
  Trajectory plan;
  double dis = 0.0;  // arc length of the retrieved plan
};

/// Nearest-centroid lookup for one goal pair; ties break to the lowest
/// cluster index. Always answers when the pair is trained.
Retrieval retrieve(const MemoryStore& store, std::pair<int, int> pair,
                   const OccupancyGrid& grid);

struct MemoryQuery {
  PathSet paths;      // per-leg coordinate sequences (start legs included)
  CostMatrix costs;   // index 0 = start, i+1 = goal i
};

/// Retrieves guide paths and distances for every leg of a problem. The start
/// state must lie inside some goal region (start legs reuse that goal's pair
/// memories). Throws when a required pair is missing from the store.
/// Coordinates are decimated to ~`spacing` meters for map construction; the
/// cost matrix holds the arc lengths of the decimated polylines.
MemoryQuery call_memory(const MemoryStore& store, const Scene& scene, Vec2 start,
                        double spacing = 0.9);

struct AugmentParams {
  double corridor = 4.5;   // obstacles within this distance of the plan jitter
  double jitter = 0.5;     // max per-axis displacement for corridor obstacles
  int scene_tries = 40;
  int place_tries = 30;
};

/// Produces `count` rearranged scenes in which `plan` stays collision-free:
/// corridor obstacles jitter in place, the rest shuffle uniformly, and every
/// output is verified against the full robot footprint along the plan.
std::vector<Scene> augment(const Scene& scene, const RobotModel& robot,
                           const Trajectory& plan, int count,
                           const AugmentParams& params, Rng& rng);

}  // namespace mgmm
