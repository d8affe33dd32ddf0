// hyperseg command line: dataset generation, training, segmentation,
// evaluation, and a built-in self-test over the library's oracle suites.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperseg/cluster.hpp"
#include "hyperseg/errors.hpp"
#include "hyperseg/geometry.hpp"
#include "hyperseg/io.hpp"
#include "hyperseg/metrics.hpp"
#include "hyperseg/model.hpp"
#include "hyperseg/patch.hpp"
#include "hyperseg/pipeline.hpp"
#include "hyperseg/rng.hpp"
#include "hyperseg/sampler.hpp"
#include "hyperseg/stats.hpp"
#include "hyperseg/synthgen.hpp"
#include "hyperseg/tensor.hpp"
#include "hyperseg/volume.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hyperseg;

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string out;
  int count = 120;
  std::uint64_t seed = 0;
  bool irregular = false;
  std::int64_t edge = 50;
};

// Train/val/test counts in a 4:1:1 ratio (80/20/20 at the default 120),
// rounded so the parts always sum to `count` and training is never empty.
std::array<int, 3> split_counts(int count) {
  int train = std::max(1, (2 * count) / 3);
  train = std::min(train, count);
  const int val = std::min(count / 6, count - train);
  const int test = count - train - val;
  return {train, val, test};
}

int run_gen(const GenArgs& a) {
  synthgen::SynthConfig cfg;
  cfg.volume_edge = a.edge;
  cfg.n_volumes = a.count;
  cfg.split = split_counts(a.count);
  cfg.irregular = a.irregular;
  cfg.seed = a.seed;

  const std::string manifest = synthgen::generate_dataset(cfg, a.out);

  // Summarize placement warnings recorded in the manifest.
  const json m = json::parse(io::read_text_file(manifest));
  int with_warnings = 0;
  for (const auto& v : m.at("volumes")) {
    if (!v.at("warnings").empty()) ++with_warnings;
  }

  json summary;
  summary["manifest"] = manifest;
  summary["count"] = a.count;
  summary["split"] = {{"train", cfg.split[0]}, {"val", cfg.split[1]}, {"test", cfg.split[2]}};
  summary["volume_edge"] = a.edge;
  summary["irregular"] = a.irregular;
  summary["volumes_with_warnings"] = with_warnings;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string config;
  std::string out;
  std::string log;  // defaults to out + ".losses.jsonl"
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
  const auto index = synthgen::read_manifest((fs::path(a.data) / "manifest.json").string());
  const auto entries = index.with_split("train");
  if (entries.empty()) throw EmptyDatasetError("manifest lists no training volumes");

  std::vector<Volume> volumes;
  volumes.reserve(entries.size());
  for (const auto& e : entries) volumes.push_back(io::read_volume(e.volume_path));

  model::RunConfig rc;
  if (!a.config.empty()) rc = model::parse_run_config(io::load_config(a.config));
  model::ModelConfig& mcfg = rc.model;
  model::TrainConfig& tcfg = rc.train;
  mcfg.validate();
  sampler::validate(tcfg.sampler);
  tcfg.seed = a.seed;
  tcfg.loss_log_path = a.log.empty() ? a.out + ".losses.jsonl" : a.log;

  const model::TrainResult result = model::train(volumes, mcfg, tcfg);
  io::save_checkpoint(a.out, result.checkpoint);

  json summary;
  summary["checkpoint"] = a.out;
  summary["loss_log"] = tcfg.loss_log_path;
  summary["train_volumes"] = entries.size();
  summary["epochs"] = tcfg.epochs;
  summary["epoch_total"] = result.epoch_total;
  summary["epoch_elbo"] = result.epoch_elbo;
  summary["epoch_triplet"] = result.epoch_triplet;
  summary["final_total"] = result.epoch_total.empty() ? 0.0 : result.epoch_total.back();
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// segment
// ---------------------------------------------------------------------------

struct SegmentArgs {
  std::string ckpt;
  std::string volume;
  std::string out;
  int k = 7;
  std::int64_t patch = 5;
  std::int64_t stride = 1;
  std::uint64_t seed = 0;
  int threads = 1;  // accepted for interface stability; execution is serial
};

int run_segment(const SegmentArgs& a) {
  if (a.threads < 1) throw Error("--threads must be >= 1");
  const io::Checkpoint ckpt = io::load_checkpoint(a.ckpt);
  const Volume vol = io::read_volume(a.volume);

  pipeline::InferenceConfig icfg;
  icfg.p = a.patch;
  icfg.k = a.k;
  icfg.stride = a.stride;
  icfg.seed = a.seed;
  icfg.validate();

  const Mask mask = pipeline::segment(vol, ckpt, icfg);
  io::write_mask(a.out, mask);

  std::uint16_t max_label = 0;
  for (const std::uint16_t v : mask.data) max_label = std::max(max_label, v);

  json summary;
  summary["mask"] = a.out;
  summary["dims"] = {mask.nx, mask.ny, mask.nz};
  summary["k"] = a.k;
  summary["labels_used"] = static_cast<int>(max_label) + 1;
  summary["patch"] = a.patch;
  summary["stride"] = a.stride;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gt_dir;
  int volume_id = -1;
  std::string out;  // defaults to pred + ".report.json"
};

int run_eval(const EvalArgs& a) {
  const Mask pred = io::read_mask(a.pred);
  const auto index = synthgen::read_manifest((fs::path(a.gt_dir) / "manifest.json").string());

  const synthgen::DatasetEntry* entry = nullptr;
  for (const auto& e : index.entries) {
    if (e.id == a.volume_id) {
      entry = &e;
      break;
    }
  }
  if (entry == nullptr) {
    throw Error("volume id " + std::to_string(a.volume_id) + " not found in manifest");
  }

  std::vector<Mask> gts;
  gts.reserve(3);
  for (const auto& path : entry->label_paths) gts.push_back(io::read_mask(path));
  if (!same_dims(pred, gts[0])) {
    throw ShapeError("predicted mask dims do not match the ground-truth volume");
  }

  std::uint16_t max_label = 0;
  for (const std::uint16_t v : pred.data) max_label = std::max(max_label, v);
  const int n_clusters = static_cast<int>(max_label) + 1;

  const auto classes = synthgen::classes_per_level();
  const metrics::Report report = metrics::evaluate_levels(
      pred, n_clusters, gts, {classes[0], classes[1], classes[2]});

  const std::string text = report.to_json(2);
  std::cout << text << "\n";
  const std::string out = a.out.empty() ? a.pred + ".report.json" : a.out;
  io::write_text_file(out, text + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

struct TestContext {
  int passed = 0;
  int failed = 0;

  void check(const std::string& name, bool ok, const std::string& detail = std::string()) {
    if (ok) {
      std::cout << "PASS " << name << "\n";
      ++passed;
    } else {
      std::cout << "FAIL " << name << (detail.empty() ? "" : " (" + detail + ")") << "\n";
      ++failed;
    }
  }
};

void guarded(TestContext& t, const std::string& name,
             const std::function<void(TestContext&)>& body) {
  try {
    body(t);
  } catch (const std::exception& e) {
    t.check(name, false, std::string("exception: ") + e.what());
  }
}

geometry::BallPoint random_ball_point(Rng& rng, std::size_t dim, double max_norm = 0.85) {
  geometry::Vec v(dim);
  for (auto& x : v) x = rng.normal();
  double norm = 0.0;
  for (const double x : v) norm += x * x;
  norm = std::sqrt(std::max(norm, 1e-300));
  const double r = max_norm * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
  for (auto& x : v) x *= r / norm;
  return geometry::BallPoint(v);
}

void st_geometry(TestContext& t) {
  Rng rng(41);
  bool axioms = true;
  std::string detail;
  for (int it = 0; it < 2000 && axioms; ++it) {
    const std::size_t dim = 2 + rng.uniform_int(4);
    const auto x = random_ball_point(rng, dim);
    const auto y = random_ball_point(rng, dim);
    const auto z = random_ball_point(rng, dim);
    const double dxy = geometry::distance(x, y);
    const double dyx = geometry::distance(y, x);
    const double dxz = geometry::distance(x, z);
    const double dzy = geometry::distance(z, y);
    if (dxy < 0.0 || geometry::distance(x, x) > 1e-12 ||
        std::abs(dxy - dyx) > 1e-9 * (1.0 + dxy) || dxy > dxz + dzy + 1e-9) {
      axioms = false;
      detail = "case " + std::to_string(it);
    }
  }
  t.check("geometry.metric_axioms", axioms, detail);

  bool round_trip = true;
  for (int it = 0; it < 500 && round_trip; ++it) {
    const std::size_t dim = 2 + rng.uniform_int(4);
    const auto x = random_ball_point(rng, dim);
    const auto y = random_ball_point(rng, dim);
    const auto back = geometry::exp_map(geometry::log_map(x, y));
    if (geometry::distance(y, back) > 1e-9) round_trip = false;
  }
  t.check("geometry.exp_log_round_trip", round_trip);

  bool cancel = true;
  for (int it = 0; it < 500 && cancel; ++it) {
    const std::size_t dim = 2 + rng.uniform_int(4);
    const auto x = random_ball_point(rng, dim);
    const auto y = random_ball_point(rng, dim);
    geometry::Vec neg = x.coords();
    for (auto& c : neg) c = -c;
    const auto back = geometry::mobius_add(geometry::BallPoint(neg),
                                           geometry::mobius_add(x, y));
    if (geometry::distance(y, back) > 1e-9) cancel = false;
  }
  t.check("geometry.mobius_cancellation", cancel);

  const double f = geometry::gyroplane(geometry::Vec{1.0, 0.0},
                                       geometry::BallPoint::origin(2),
                                       geometry::BallPoint(geometry::Vec{0.5, 0.0}));
  t.check("geometry.gyroplane_worked_example",
          std::abs(f - 2.0 * std::log(3.0)) < 1e-7,
          "got " + std::to_string(f));
}

void st_stats(TestContext& t) {
  const stats::WrappedNormal q(geometry::BallPoint(geometry::Vec{0.3, 0.0}),
                               geometry::Vec{0.8, 1.2});
  const auto p = stats::WrappedNormal::standard(2);

  // Polar quadrature around the origin: a point at geodesic radius rho has
  // Euclidean radius tanh(rho / 2) and the area element is sinh(rho) drho dtheta.
  const int n_r = 600, n_t = 128;
  const double r_max = 12.0;
  const double dr = r_max / n_r;
  const double dt = 2.0 * std::acos(-1.0) / n_t;
  double mass = 0.0, kl_quad = 0.0;
  for (int i = 0; i < n_r; ++i) {
    const double rho = (i + 0.5) * dr;
    const double er = std::tanh(0.5 * rho);
    const double area = std::sinh(rho) * dr * dt;
    for (int j = 0; j < n_t; ++j) {
      const double th = (j + 0.5) * dt;
      const geometry::BallPoint z(geometry::Vec{er * std::cos(th), er * std::sin(th)});
      const double lq = stats::log_prob(q, z);
      const double lp = stats::log_prob(p, z);
      const double qz = std::exp(lq);
      mass += qz * area;
      kl_quad += qz * (lq - lp) * area;
    }
  }
  t.check("stats.wrapped_normal_normalization", std::abs(mass - 1.0) < 0.02,
          "mass " + std::to_string(mass));

  Rng rng(7);
  const double kl = stats::kl_mc(q, p, rng, 50000);
  t.check("stats.kl_mc_vs_quadrature",
          std::abs(kl - kl_quad) < 0.03 * std::max(1.0, std::abs(kl_quad)),
          "mc " + std::to_string(kl) + " quad " + std::to_string(kl_quad));
}

void st_cluster(TestContext& t) {
  const geometry::BallPoint x(geometry::Vec{0.5, 0.0});
  const geometry::BallPoint y(geometry::Vec{-0.2, 0.3});
  geometry::Vec neg = x.coords();
  for (auto& c : neg) c = -c;
  const auto half = geometry::mobius_scalar_mul(
      0.5, geometry::mobius_add(geometry::BallPoint(neg), y));
  const auto midpoint = geometry::mobius_add(x, half);
  const auto mean = cluster::frechet_mean({x, y});
  t.check("cluster.frechet_midpoint", geometry::distance(mean, midpoint) < 1e-6);

  Rng rng(13);
  std::vector<geometry::Vec> points;
  std::vector<int> truth;
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int c = 0; c < 3; ++c) {
    const double th = two_pi * c / 3.0;
    const geometry::BallPoint center(geometry::Vec{0.6 * std::cos(th), 0.6 * std::sin(th)});
    for (int i = 0; i < 40; ++i) {
      const geometry::Vec noise{0.05 * rng.normal(), 0.05 * rng.normal()};
      points.push_back(geometry::exp_map(center, noise).coords());
      truth.push_back(c);
    }
  }
  cluster::KMeansConfig kcfg;
  kcfg.k = 3;
  kcfg.seed = 0;
  const auto result = cluster::kmeans(points, kcfg);
  const double ari = metrics::adjusted_rand_index(result.labels, truth);
  t.check("cluster.kmeans_recovery", ari >= 0.95, "ari " + std::to_string(ari));

  bool monotone = true;
  for (std::size_t i = 1; i < result.objective_history.size(); ++i) {
    if (result.objective_history[i] > result.objective_history[i - 1] + 1e-9) monotone = false;
  }
  t.check("cluster.kmeans_objective_monotone", monotone);
}

void st_metrics(TestContext& t) {
  Rng rng(29);
  bool hungarian_ok = true;
  std::string detail;
  for (int trial = 0; trial < 20 && hungarian_ok; ++trial) {
    const int n = 6;
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (auto& row : cost) {
      for (auto& v : row) v = rng.uniform();
    }
    double total = 0.0;
    metrics::hungarian(cost, &total);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += cost[i][perm[i]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (std::abs(total - best) > 1e-9) {
      hungarian_ok = false;
      detail = "trial " + std::to_string(trial);
    }
  }
  t.check("metrics.hungarian_vs_exhaustive", hungarian_ok, detail);

  Mask a(4, 1, 1), b(4, 1, 1);
  a.data = {1, 1, 0, 0};
  b.data = {1, 0, 0, 0};
  const double d_overlap = metrics::dice(a, 1, b, 1);
  const double d_empty = metrics::dice(a, 3, b, 3);
  t.check("metrics.dice_hand_values",
          std::abs(d_overlap - 2.0 / 3.0) < 1e-12 && d_empty == 1.0);

  Mask h1(8, 1, 1), h2(8, 1, 1);
  h1.at(1, 0, 0) = 1;
  h2.at(6, 0, 0) = 1;
  const auto hd = metrics::mask_hausdorff(h1, 1, h2, 1);
  t.check("metrics.hausdorff_singletons",
          hd.hausdorff == 5.0 && hd.average == 5.0 && hd.percentile95 == 5.0);
}

void st_io(TestContext& t, const fs::path& dir) {
  Rng rng(3);
  Volume vol(3, 4, 5);
  for (auto& v : vol.data) v = static_cast<float>(rng.normal());
  const std::string vol_path = (dir / "st_vol.vox").string();
  io::write_volume(vol_path, vol);
  const Volume back = io::read_volume(vol_path);
  bool vox_ok = back.nx == 3 && back.ny == 4 && back.nz == 5 && back.data == vol.data;

  Mask mask(4, 3, 2);
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    mask.data[i] = static_cast<std::uint16_t>(i % 7);
  }
  const std::string m16 = (dir / "st_mask16.vox").string();
  const std::string m8 = (dir / "st_mask8.vox").string();
  io::write_mask(m16, mask, io::VoxDtype::kU16);
  io::write_mask(m8, mask, io::VoxDtype::kU8);
  vox_ok = vox_ok && io::read_mask(m16).data == mask.data &&
           io::read_mask(m8).data == mask.data &&
           io::peek_dtype(m16) == io::VoxDtype::kU16 &&
           io::peek_dtype(m8) == io::VoxDtype::kU8;
  t.check("io.vox_round_trip", vox_ok);

  io::Checkpoint ckpt;
  ckpt.config_json = "{\"d\":2}";
  ckpt.params.push_back({"w", {2, 3}, {1.0f, 2.0f, 3.0f, 4.0f, 5.0f, 6.0f}});
  ckpt.params.push_back({"b", {3}, {0.5f, -0.5f, 0.25f}});
  ckpt.opt_state.push_back({"w.m", {2, 3}, {0, 0, 0, 0, 0, 0}});
  ckpt.rng_seed = 99;
  const std::string c1 = (dir / "st_ckpt1.hvc").string();
  const std::string c2 = (dir / "st_ckpt2.hvc").string();
  io::save_checkpoint(c1, ckpt);
  io::save_checkpoint(c2, io::load_checkpoint(c1));
  t.check("io.checkpoint_round_trip",
          io::read_text_file(c1) == io::read_text_file(c2));
}

void st_sampler(TestContext& t) {
  Rng rng(17);
  const sampler::Dims dims{50, 50, 50};
  sampler::SamplerConfig cfg;
  bool ok = true;
  std::string detail;
  for (int it = 0; it < 1000 && ok; ++it) {
    const auto trip = sampler::sample_triplet(dims, cfg, rng);
    if (!sampler::patch_inside(trip.anchor, dims) ||
        !sampler::patch_contains(trip.anchor, trip.positive) ||
        sampler::patches_overlap(trip.anchor, trip.negative) ||
        trip.positive.edge < cfg.l_min ||
        trip.positive.edge > trip.anchor.edge - cfg.r_gap ||
        trip.positive.edge != trip.negative.edge) {
      ok = false;
      detail = "case " + std::to_string(it);
    }
  }
  t.check("sampler.triplet_invariants", ok, detail);
}

void st_synthgen(TestContext& t) {
  synthgen::SynthConfig cfg;
  cfg.n_volumes = 1;
  cfg.split = {1, 0, 0};
  const auto a = synthgen::generate_volume(cfg, 11);
  const auto b = synthgen::generate_volume(cfg, 11);
  const auto c = synthgen::generate_volume(cfg, 12);
  const bool same = a.intensities.data == b.intensities.data &&
                    a.labels[0].data == b.labels[0].data &&
                    a.labels[1].data == b.labels[1].data &&
                    a.labels[2].data == b.labels[2].data;
  t.check("synthgen.determinism",
          same && a.intensities.data != c.intensities.data);
}

void st_model(TestContext& t) {
  model::ModelConfig cfg;
  model::Model net(cfg, 5);

  Rng rng(9);
  Volume vol(16, 16, 16);
  for (auto& v : vol.data) v = static_cast<float>(rng.normal());
  sampler::PatchSpec spec;
  spec.center = {8, 8, 8};
  spec.edge = 16;
  const nn::Tensor patch = pipeline::patch_to_tensor(vol, spec);

  nn::NoGradGuard guard;
  const auto mu0 = net.encode(patch).mu.data();
  const io::Checkpoint ckpt = net.to_checkpoint(nullptr, 0);
  const model::Model load1 = model::Model::from_checkpoint(ckpt);
  const model::Model load2 = model::Model::from_checkpoint(ckpt);
  const auto mu1 = load1.encode(patch).mu.data();
  const auto mu2 = load2.encode(patch).mu.data();

  bool close = mu0.size() == mu1.size();
  for (std::size_t i = 0; close && i < mu0.size(); ++i) {
    if (std::abs(mu0[i] - mu1[i]) > 1e-4 * (1.0 + std::abs(mu0[i]))) close = false;
  }
  t.check("model.checkpoint_forward_identity", close && mu1 == mu2);
}

int run_selftest() {
  TestContext t;
  const fs::path dir =
      fs::temp_directory_path() /
      ("hyperseg-selftest-" +
       std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  fs::create_directories(dir);

  guarded(t, "geometry", st_geometry);
  guarded(t, "stats", st_stats);
  guarded(t, "cluster", st_cluster);
  guarded(t, "metrics", st_metrics);
  guarded(t, "io", [&dir](TestContext& ctx) { st_io(ctx, dir); });
  guarded(t, "sampler", st_sampler);
  guarded(t, "synthgen", st_synthgen);
  guarded(t, "model", st_model);

  std::error_code ec;
  fs::remove_all(dir, ec);

  std::cout << "selftest: " << t.passed << " passed, " << t.failed << " failed\n";
  return t.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperseg: hierarchical hyperbolic segmentation of voxel volumes"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset + manifest");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--count", gen.count, "Number of volumes")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Dataset seed");
  gen_cmd->add_option("--edge", gen.edge, "Volume edge (voxels)")->check(CLI::PositiveNumber);
  gen_cmd->add_flag("--irregular", gen.irregular, "Warp shape boundaries");

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model on a dataset");
  train_cmd->add_option("--data", train.data, "Dataset directory (holds manifest.json)")
      ->required();
  train_cmd->add_option("--config", train.config, "key = value run configuration file");
  train_cmd->add_option("--out", train.out, "Checkpoint output path")->required();
  train_cmd->add_option("--seed", train.seed, "Training seed");
  train_cmd->add_option("--log", train.log, "Loss log path (default: OUT.losses.jsonl)");

  SegmentArgs seg;
  CLI::App* seg_cmd = app.add_subcommand("segment", "Segment a volume with a checkpoint");
  seg_cmd->add_option("--ckpt", seg.ckpt, "Checkpoint path")->required();
  seg_cmd->add_option("--volume", seg.volume, "Input volume (VOX1 f32)")->required();
  seg_cmd->add_option("--k", seg.k, "Number of clusters")->check(CLI::PositiveNumber);
  seg_cmd->add_option("--patch", seg.patch, "Inference patch edge (odd)")
      ->check(CLI::PositiveNumber);
  seg_cmd->add_option("--stride", seg.stride, "Embedding grid stride")
      ->check(CLI::PositiveNumber);
  seg_cmd->add_option("--seed", seg.seed, "k-means seed");
  seg_cmd->add_option("--threads", seg.threads, "Worker threads (1 = deterministic)");
  seg_cmd->add_option("--out", seg.out, "Output mask path (VOX1 u16)")->required();

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a predicted mask against ground truth");
  eval_cmd->add_option("--pred", eval.pred, "Predicted mask path")->required();
  eval_cmd->add_option("--gt-dir", eval.gt_dir, "Dataset directory (holds manifest.json)")
      ->required();
  eval_cmd->add_option("--volume-id", eval.volume_id, "Manifest volume id")->required();
  eval_cmd->add_option("--out", eval.out, "Report path (default: PRED.report.json)");

  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "Run the built-in property/oracle suites");

  int rc = 0;
  gen_cmd->callback([&]() { rc = run_gen(gen); });
  train_cmd->callback([&]() { rc = run_train(train); });
  seg_cmd->callback([&]() { rc = run_segment(seg); });
  eval_cmd->callback([&]() { rc = run_eval(eval); });
  selftest_cmd->callback([&]() { rc = run_selftest(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const hyperseg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
