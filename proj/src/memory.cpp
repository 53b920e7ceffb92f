#include "mgmm/memory.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mgmm/effort.hpp"

namespace mgmm {

namespace {

constexpr double kNormFloor = 1e-12;

Eigen::VectorXd normalize_embedding(const Eigen::VectorXd& z) {
  return z / std::max(z.norm(), kNormFloor);
}

void charge_forward_macs(const Encoder& e, int batch) {
  const auto macs = static_cast<uint64_t>(e.w1_.rows()) * static_cast<uint64_t>(e.w1_.cols()) +
                    static_cast<uint64_t>(e.w2_.rows()) * static_cast<uint64_t>(e.w2_.cols()) +
                    static_cast<uint64_t>(e.w3_.rows()) * static_cast<uint64_t>(e.w3_.cols());
  effort().net_macs += macs * static_cast<uint64_t>(batch);
}

}  // namespace

Encoder::Encoder(int input_dim, uint64_t seed) {
  Rng rng(seed);
  const auto init = [&rng](Eigen::MatrixXd& w, Eigen::VectorXd& b, int rows, int cols) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    w.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
    }
    b = Eigen::VectorXd::Constant(rows, 0.01);
  };
  init(w1_, b1_, kHidden1, input_dim);
  init(w2_, b2_, kHidden2, kHidden1);
  init(w3_, b3_, kEmbed, kHidden2);
}

Eigen::VectorXd Encoder::embed(const Eigen::VectorXd& grid) const {
  charge_forward_macs(*this, 1);
  const Eigen::VectorXd h1 = (w1_ * grid + b1_).cwiseMax(0.0);
  const Eigen::VectorXd h2 = (w2_ * h1 + b2_).cwiseMax(0.0);
  const Eigen::VectorXd z = w3_ * h2 + b3_;
  return normalize_embedding(z);
}

Eigen::MatrixXd Encoder::embed_batch(const Eigen::MatrixXd& grids) const {
  charge_forward_macs(*this, static_cast<int>(grids.cols()));
  Eigen::MatrixXd h1 = ((w1_ * grids).colwise() + b1_).cwiseMax(0.0);
  Eigen::MatrixXd h2 = ((w2_ * h1).colwise() + b2_).cwiseMax(0.0);
  Eigen::MatrixXd z = (w3_ * h2).colwise() + b3_;
  for (int c = 0; c < z.cols(); ++c) {
    z.col(c) /= std::max(z.col(c).norm(), kNormFloor);
  }
  return z;
}

Eigen::VectorXd grid_to_input(const OccupancyGrid& grid) {
  Eigen::VectorXd v(grid.cells.size());
  for (size_t i = 0; i < grid.cells.size(); ++i) v[static_cast<long>(i)] = grid.cells[i] ? 1.0 : 0.0;
  return v;
}

TripletResult triplet_loss(const Eigen::VectorXd& anchor,
                           const Eigen::VectorXd& similar,
                           const Eigen::VectorXd& dissimilar, double margin) {
  TripletResult res;
  const Eigen::VectorXd as = anchor - similar;
  const Eigen::VectorXd ad = anchor - dissimilar;
  const double n_as = as.norm();
  const double n_ad = ad.norm();
  const double raw = n_as - n_ad + margin;

  res.d_anchor = Eigen::VectorXd::Zero(anchor.size());
  res.d_similar = Eigen::VectorXd::Zero(anchor.size());
  res.d_dissimilar = Eigen::VectorXd::Zero(anchor.size());
  if (raw <= 0.0) return res;

  res.loss = raw;
  const Eigen::VectorXd u_as = as / std::max(n_as, kNormFloor);
  const Eigen::VectorXd u_ad = ad / std::max(n_ad, kNormFloor);
  res.d_anchor = u_as - u_ad;
  res.d_similar = -u_as;
  res.d_dissimilar = u_ad;
  return res;
}

namespace {

// Activations cached for one batched forward; columns are samples.
struct ForwardCache {
  Eigen::MatrixXd x, h1, h2, z, e;
  Eigen::VectorXd znorm;
};

ForwardCache forward_cached(const Encoder& enc, Eigen::MatrixXd x) {
  ForwardCache f;
  f.x = std::move(x);
  f.h1 = ((enc.w1_ * f.x).colwise() + enc.b1_).cwiseMax(0.0);
  f.h2 = ((enc.w2_ * f.h1).colwise() + enc.b2_).cwiseMax(0.0);
  f.z = (enc.w3_ * f.h2).colwise() + enc.b3_;
  f.znorm.resize(f.z.cols());
  f.e = f.z;
  for (int c = 0; c < f.z.cols(); ++c) {
    f.znorm[c] = std::max(f.z.col(c).norm(), kNormFloor);
    f.e.col(c) /= f.znorm[c];
  }
  return f;
}

struct Grads {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;
};

/// Adam state for one parameter block.
struct AdamState {
  Eigen::MatrixXd m, v;

  void init(long rows, long cols) {
    m = Eigen::MatrixXd::Zero(rows, cols);
    v = Eigen::MatrixXd::Zero(rows, cols);
  }

  void step(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad, double lr,
            int t) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    const double corr1 = 1.0 - std::pow(b1, t);
    const double corr2 = 1.0 - std::pow(b2, t);
    param -= (lr / corr1) *
             (m.array() / ((v.array() / corr2).sqrt() + eps)).matrix();
  }
};

void backward(const Encoder& enc, const ForwardCache& f, const Eigen::MatrixXd& de,
              Grads& g) {
  // Through the unit-norm output: dz = (de - e * (e . de)) / ||z||.
  Eigen::MatrixXd dz = de;
  for (int c = 0; c < dz.cols(); ++c) {
    const double proj = f.e.col(c).dot(de.col(c));
    dz.col(c) = (de.col(c) - f.e.col(c) * proj) / f.znorm[c];
  }
  g.w3 += dz * f.h2.transpose();
  g.b3 += dz.rowwise().sum();
  Eigen::MatrixXd dh2 = (enc.w3_.transpose() * dz).cwiseProduct(
      (f.h2.array() > 0.0).cast<double>().matrix());
  g.w2 += dh2 * f.h1.transpose();
  g.b2 += dh2.rowwise().sum();
  Eigen::MatrixXd dh1 = (enc.w2_.transpose() * dh2).cwiseProduct(
      (f.h1.array() > 0.0).cast<double>().matrix());
  g.w1 += dh1 * f.x.transpose();
  g.b1 += dh1.rowwise().sum();
}

}  // namespace

Encoder train_encoder(const std::vector<std::vector<Eigen::VectorXd>>& clusters,
                      int input_dim, const TrainConfig& cfg, TrainReport* report) {
  if (clusters.size() < 2) {
    throw std::invalid_argument("train_encoder: degenerate dataset, need at least "
                                "two clusters");
  }
  size_t total = 0;
  for (const auto& c : clusters) {
    if (c.size() < 2) {
      throw std::invalid_argument("train_encoder: degenerate dataset, every "
                                  "cluster needs at least two members");
    }
    total += c.size();
  }

  Encoder enc(input_dim, cfg.seed);
  Rng rng = Rng(cfg.seed).fork(0x7261696e);
  const int steps_per_epoch =
      std::max<int>(1, static_cast<int>((total + cfg.batch - 1) / static_cast<size_t>(cfg.batch)));

  AdamState aw1, ab1, aw2, ab2, aw3, ab3;
  aw1.init(enc.w1_.rows(), enc.w1_.cols());
  ab1.init(enc.b1_.size(), 1);
  aw2.init(enc.w2_.rows(), enc.w2_.cols());
  ab2.init(enc.b2_.size(), 1);
  aw3.init(enc.w3_.rows(), enc.w3_.cols());
  ab3.init(enc.b3_.size(), 1);
  int adam_t = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    int epoch_triplets = 0;
    for (int step = 0; step < steps_per_epoch; ++step) {
      // Batch columns: [anchors | similars | dissimilars].
      Eigen::MatrixXd x(input_dim, 3 * cfg.batch);
      for (int b = 0; b < cfg.batch; ++b) {
        const size_t ci = rng.index(clusters.size());
        size_t cj = rng.index(clusters.size() - 1);
        if (cj >= ci) ++cj;
        const auto& pos = clusters[ci];
        const size_t ai = rng.index(pos.size());
        size_t si = rng.index(pos.size() - 1);
        if (si >= ai) ++si;
        const auto& neg = clusters[cj];
        const size_t di = rng.index(neg.size());
        x.col(b) = pos[ai];
        x.col(cfg.batch + b) = pos[si];
        x.col(2 * cfg.batch + b) = neg[di];
      }

      ForwardCache f = forward_cached(enc, std::move(x));
      Eigen::MatrixXd de = Eigen::MatrixXd::Zero(f.e.rows(), f.e.cols());
      for (int b = 0; b < cfg.batch; ++b) {
        const TripletResult t = triplet_loss(f.e.col(b), f.e.col(cfg.batch + b),
                                             f.e.col(2 * cfg.batch + b), cfg.margin);
        epoch_loss += t.loss;
        ++epoch_triplets;
        de.col(b) += t.d_anchor;
        de.col(cfg.batch + b) += t.d_similar;
        de.col(2 * cfg.batch + b) += t.d_dissimilar;
      }
      de /= static_cast<double>(cfg.batch);

      Grads g{Eigen::MatrixXd::Zero(enc.w1_.rows(), enc.w1_.cols()),
              Eigen::MatrixXd::Zero(enc.w2_.rows(), enc.w2_.cols()),
              Eigen::MatrixXd::Zero(enc.w3_.rows(), enc.w3_.cols()),
              Eigen::VectorXd::Zero(enc.b1_.size()),
              Eigen::VectorXd::Zero(enc.b2_.size()),
              Eigen::VectorXd::Zero(enc.b3_.size())};
      backward(enc, f, de, g);
      ++adam_t;
      aw1.step(enc.w1_, g.w1, cfg.lr, adam_t);
      ab1.step(enc.b1_, g.b1, cfg.lr, adam_t);
      aw2.step(enc.w2_, g.w2, cfg.lr, adam_t);
      ab2.step(enc.b2_, g.b2, cfg.lr, adam_t);
      aw3.step(enc.w3_, g.w3, cfg.lr, adam_t);
      ab3.step(enc.b3_, g.b3, cfg.lr, adam_t);
    }
    if (report) {
      report->epoch_loss.push_back(epoch_loss / std::max(1, epoch_triplets));
    }
  }
  return enc;
}

PairMemory build_pair_memory(const PairExperience& exp, int grid_resolution,
                             const TrainConfig& cfg, TrainReport* report) {
  std::vector<std::vector<Eigen::VectorXd>> clusters;
  clusters.reserve(exp.clusters.size());
  for (const auto& c : exp.clusters) {
    std::vector<Eigen::VectorXd> grids;
    grids.reserve(c.grids.size());
    for (const auto& g : c.grids) {
      if (g.resolution != grid_resolution) {
        throw std::invalid_argument("build_pair_memory: grid resolution mismatch");
      }
      grids.push_back(grid_to_input(g));
    }
    clusters.push_back(std::move(grids));
  }

  PairMemory mem;
  const int input_dim = grid_resolution * grid_resolution;
  mem.encoder = train_encoder(clusters, input_dim, cfg, report);
  for (size_t i = 0; i < clusters.size(); ++i) {
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(mem.encoder.embed_dim());
    for (const auto& g : clusters[i]) centroid += mem.encoder.embed(g);
    centroid /= static_cast<double>(clusters[i].size());
    mem.centroids.push_back(centroid);
    mem.plans.push_back(exp.clusters[i].plan);
  }
  return mem;
}

Retrieval retrieve(const MemoryStore& store, std::pair<int, int> pair,
                   const OccupancyGrid& grid) {
  const auto it = store.pairs.find(pair);
  if (it == store.pairs.end()) {
    std::ostringstream msg;
    msg << "memory store has no pair (" << pair.first << ", " << pair.second << ")";
    throw std::runtime_error(msg.str());
  }
  if (grid.resolution != store.grid_resolution) {
    throw std::invalid_argument("retrieve: grid resolution mismatch");
  }
  const PairMemory& mem = it->second;
  const Eigen::VectorXd e = mem.encoder.embed(grid_to_input(grid));
  Retrieval res;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < mem.centroids.size(); ++i) {
    const double d = (e - mem.centroids[i]).norm();
    if (d < best) {
      best = d;
      res.cluster = static_cast<int>(i);
    }
  }
  res.plan = mem.plans[static_cast<size_t>(res.cluster)];
  const auto pos = res.plan.positions();
  res.dis = polyline_length(pos);
  return res;
}

namespace {

std::vector<Vec2> decimate(const std::vector<Vec2>& pts, double spacing) {
  if (pts.size() <= 2) return pts;
  std::vector<Vec2> out{pts.front()};
  double acc = 0.0;
  for (size_t i = 1; i + 1 < pts.size(); ++i) {
    acc += distance(pts[i - 1], pts[i]);
    if (acc >= spacing) {
      out.push_back(pts[i]);
      acc = 0.0;
    }
  }
  out.push_back(pts.back());
  return out;
}

}  // namespace

MemoryQuery call_memory(const MemoryStore& store, const Scene& scene, Vec2 start,
                        double spacing) {
  const int n = static_cast<int>(scene.goals.size());
  int start_goal = -1;
  for (int i = 0; i < n; ++i) {
    if (scene.goals[static_cast<size_t>(i)].contains(start)) {
      start_goal = i;
      break;
    }
  }
  if (start_goal < 0) {
    throw std::runtime_error("call_memory: start state lies inside no goal region");
  }

  const OccupancyGrid grid = rasterize(scene, store.grid_resolution);
  MemoryQuery q;
  q.costs = CostMatrix(n);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Retrieval r = retrieve(store, {i, j}, grid);
      auto coords = decimate(r.plan.positions(), spacing);
      q.costs.at(i + 1, j + 1) = polyline_length(coords);
      q.paths[{i, j}] = std::move(coords);
    }
  }
  for (int j = 0; j < n; ++j) {
    if (j == start_goal) {
      q.paths[{-1, j}] = {start};
      q.costs.at(0, j + 1) = 0.0;
    } else {
      q.paths[{-1, j}] = q.paths.at({start_goal, j});
      q.costs.at(0, j + 1) = q.costs.at(start_goal + 1, j + 1);
    }
  }
  return q;
}

std::vector<Scene> augment(const Scene& scene, const RobotModel& robot,
                           const Trajectory& plan, int count,
                           const AugmentParams& params, Rng& rng) {
  const auto swept = plan.positions();
  const double clear_radius = robot.circumradius() + 0.05;

  const auto off_footprint = [&](const Obstacle& o) {
    const Aabb box = o.aabb();
    const double reach = std::hypot(o.hw, o.hh) + clear_radius;
    if (point_polyline_distance(o.center, swept) > reach) return true;
    for (size_t i = 1; i < swept.size(); ++i) {
      if (segment_aabb_distance(swept[i - 1], swept[i], box) <= clear_radius) return false;
    }
    if (!swept.empty() && point_aabb_distance(swept[0], box) <= clear_radius) return false;
    return true;
  };
  const auto clear_of_goals = [&](const Obstacle& o) {
    for (const auto& g : scene.goals) {
      if (point_aabb_distance(g.center, o.aabb()) < g.radius + 0.75) return false;
    }
    return true;
  };

  std::vector<Scene> out;
  out.reserve(static_cast<size_t>(count));
  for (int m = 0; m < count; ++m) {
    bool done = false;
    for (int attempt = 0; attempt < params.scene_tries && !done; ++attempt) {
      Scene cand = scene;
      cand.id = scene.id + "-aug" + std::to_string(m);
      for (auto& o : cand.obstacles) {
        const bool near = point_polyline_distance(o.center, swept) <= params.corridor;
        if (near) {
          for (int t = 0; t < 12; ++t) {
            Obstacle moved = o;
            moved.center.x += rng.uniform(-params.jitter, params.jitter);
            moved.center.y += rng.uniform(-params.jitter, params.jitter);
            if (!scene.bounds.contains(moved.aabb())) continue;
            if (!off_footprint(moved) || !clear_of_goals(moved)) continue;
            o = moved;
            break;
          }
        } else {
          for (int t = 0; t < params.place_tries; ++t) {
            Obstacle moved = o;
            moved.center.x = rng.uniform(scene.bounds.xmin + o.hw, scene.bounds.xmax - o.hw);
            moved.center.y = rng.uniform(scene.bounds.ymin + o.hh, scene.bounds.ymax - o.hh);
            if (!off_footprint(moved) || !clear_of_goals(moved)) continue;
            o = moved;
            break;
          }
        }
      }
      if (trajectory_collision_free(cand, robot, plan)) {
        out.push_back(std::move(cand));
        done = true;
      }
    }
    if (!done) {
      throw std::runtime_error("augment: could not rearrange obstacles around the "
                               "plan after bounded retries");
    }
  }
  return out;
}

// ---- store serialization ---------------------------------------------------

namespace {

void put_u32(std::ostream& os, uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_i32(std::ostream& os, int32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

uint32_t get_u32(std::istream& is) {
  uint32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
int32_t get_i32(std::istream& is) {
  int32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
double get_f64(std::istream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string get_string(std::istream& is) {
  const uint32_t n = get_u32(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  return s;
}

void put_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  put_i32(os, static_cast<int32_t>(m.rows()));
  put_i32(os, static_cast<int32_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m.size())));
}
Eigen::MatrixXd get_matrix(std::istream& is) {
  const int32_t r = get_i32(is), c = get_i32(is);
  Eigen::MatrixXd m(r, c);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m.size())));
  return m;
}

void put_vector(std::ostream& os, const Eigen::VectorXd& v) {
  put_i32(os, static_cast<int32_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(v.size())));
}
Eigen::VectorXd get_vector(std::istream& is) {
  const int32_t n = get_i32(is);
  Eigen::VectorXd v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(v.size())));
  return v;
}

void put_trajectory(std::ostream& os, const Trajectory& t) {
  put_f64(os, t.dt);
  put_u32(os, static_cast<uint32_t>(t.states.size()));
  for (const auto& s : t.states) {
    put_f64(os, s.x);
    put_f64(os, s.y);
    put_f64(os, s.theta);
    put_f64(os, s.psi);
    put_f64(os, s.v);
    put_u32(os, static_cast<uint32_t>(s.trailer.size()));
    for (double a : s.trailer) put_f64(os, a);
  }
  put_u32(os, static_cast<uint32_t>(t.actions.size()));
  for (const auto& a : t.actions) {
    put_f64(os, a.acc);
    put_f64(os, a.omega);
  }
}

Trajectory get_trajectory(std::istream& is) {
  Trajectory t;
  t.dt = get_f64(is);
  const uint32_t ns = get_u32(is);
  t.states.resize(ns);
  for (auto& s : t.states) {
    s.x = get_f64(is);
    s.y = get_f64(is);
    s.theta = get_f64(is);
    s.psi = get_f64(is);
    s.v = get_f64(is);
    const uint32_t nt = get_u32(is);
    s.trailer.resize(nt);
    for (double& a : s.trailer) a = get_f64(is);
  }
  const uint32_t na = get_u32(is);
  t.actions.resize(na);
  for (auto& a : t.actions) {
    a.acc = get_f64(is);
    a.omega = get_f64(is);
  }
  return t;
}

constexpr char kMagic[4] = {'M', 'M', 'E', 'M'};

}  // namespace

void MemoryStore::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write store file: " + path);
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_i32(os, grid_resolution);
  put_i32(os, n_goals);
  put_string(os, layout);
  put_string(os, scene_class);
  put_string(os, robot);
  put_u32(os, static_cast<uint32_t>(pairs.size()));
  for (const auto& [key, mem] : pairs) {
    put_i32(os, key.first);
    put_i32(os, key.second);
    put_matrix(os, mem.encoder.w1_);
    put_vector(os, mem.encoder.b1_);
    put_matrix(os, mem.encoder.w2_);
    put_vector(os, mem.encoder.b2_);
    put_matrix(os, mem.encoder.w3_);
    put_vector(os, mem.encoder.b3_);
    put_u32(os, static_cast<uint32_t>(mem.centroids.size()));
    for (const auto& c : mem.centroids) put_vector(os, c);
    put_u32(os, static_cast<uint32_t>(mem.plans.size()));
    for (const auto& p : mem.plans) put_trajectory(os, p);
  }
}

MemoryStore MemoryStore::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read store file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a memory store file: " + path);
  }
  const uint32_t version = get_u32(is);
  if (version != kVersion) {
    throw std::runtime_error("unsupported store version " + std::to_string(version));
  }
  MemoryStore store;
  store.grid_resolution = get_i32(is);
  store.n_goals = get_i32(is);
  store.layout = get_string(is);
  store.scene_class = get_string(is);
  store.robot = get_string(is);
  const uint32_t n_pairs = get_u32(is);
  for (uint32_t i = 0; i < n_pairs; ++i) {
    const int a = get_i32(is);
    const int b = get_i32(is);
    PairMemory mem;
    mem.encoder.w1_ = get_matrix(is);
    mem.encoder.b1_ = get_vector(is);
    mem.encoder.w2_ = get_matrix(is);
    mem.encoder.b2_ = get_vector(is);
    mem.encoder.w3_ = get_matrix(is);
    mem.encoder.b3_ = get_vector(is);
    const uint32_t nc = get_u32(is);
    mem.centroids.resize(nc);
    for (auto& c : mem.centroids) c = get_vector(is);
    const uint32_t np = get_u32(is);
    mem.plans.resize(np);
    for (auto& p : mem.plans) p = get_trajectory(is);
    store.pairs.emplace(std::make_pair(a, b), std::move(mem));
  }
  if (!is) throw std::runtime_error("truncated store file: " + path);
  return store;
}

}  // namespace mgmm
