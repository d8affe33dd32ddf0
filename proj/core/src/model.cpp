#include "hyperseg/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hyperseg/patch.hpp"
#include "hyperseg/stats.hpp"

namespace hyperseg::model {

using nn::Tensor;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

void ModelConfig::validate() const {
  if (!is_pow2(m) || m < 16) throw Error("ModelConfig: m must be a power of 2 >= 16");
  if (d < 2) throw Error("ModelConfig: d must be >= 2");
  if (beta < 0.0) throw Error("ModelConfig: beta must be >= 0");
  if (alpha < 0.0) throw Error("ModelConfig: alpha must be >= 0");
  if (filters.size() != 4) throw Error("ModelConfig: exactly four encoder filter sizes");
  for (std::int64_t f : filters) {
    if (f < 1) throw Error("ModelConfig: filter sizes must be positive");
  }
  if (kernel < 1 || kernel % 2 == 0) throw Error("ModelConfig: kernel must be odd");
  if (latent_grid != m / 16) {
    throw Error("ModelConfig: latent_grid must equal m / 16 (four stride-2 layers)");
  }
  if (use_gyro && !hyperbolic) {
    throw Error("ModelConfig: use_gyro requires the hyperbolic latent space");
  }
  if (kl_samples < 1) throw Error("ModelConfig: kl_samples must be >= 1");
}

std::string ModelConfig::to_json() const {
  nlohmann::json j;
  j["m"] = m;
  j["d"] = d;
  j["filters"] = filters;
  j["kernel"] = kernel;
  j["beta"] = beta;
  j["alpha"] = alpha;
  j["latent_grid"] = latent_grid;
  j["hyperbolic"] = hyperbolic;
  j["use_gyro"] = use_gyro;
  j["use_triplet"] = use_triplet;
  j["kl_samples"] = kl_samples;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ModelConfig: ") + e.what(), 0);
  }
  ModelConfig cfg;
  try {
    cfg.m = j.value("m", cfg.m);
    cfg.d = j.value("d", cfg.d);
    if (j.contains("filters")) cfg.filters = j["filters"].get<std::vector<std::int64_t>>();
    cfg.kernel = j.value("kernel", cfg.kernel);
    cfg.beta = j.value("beta", cfg.beta);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.latent_grid = j.value("latent_grid", cfg.m / 16);
    cfg.hyperbolic = j.value("hyperbolic", cfg.hyperbolic);
    cfg.use_gyro = j.value("use_gyro", cfg.use_gyro);
    cfg.use_triplet = j.value("use_triplet", cfg.use_triplet);
    cfg.kl_samples = j.value("kl_samples", cfg.kl_samples);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ModelConfig: ") + e.what(), 0);
  }
  return cfg;
}

Model::Model(ModelConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const std::int64_t k = cfg_.kernel;
  const std::int64_t kc = k * k * k;

  // Every parameter draws from its own name-derived stream so that configs
  // sharing a layer initialize it identically under the same seed.
  const auto add = [&](const std::string& name, nn::Shape shape, double stddev) {
    Rng r(Rng::derive_seed(seed, fnv1a(name)));
    Tensor t = stddev == 0.0 ? Tensor::zeros(shape, true)
                             : Tensor::randn(std::move(shape), r, stddev, true);
    params_.emplace_back(name, t);
    return t;
  };

  std::int64_t ci = 1;
  for (int i = 0; i < 4; ++i) {
    const std::int64_t co = cfg_.filters[static_cast<std::size_t>(i)];
    const std::string base = "enc.conv" + std::to_string(i + 1);
    add(base + ".w", {co, ci, k, k, k}, std::sqrt(2.0 / static_cast<double>(ci * kc)));
    add(base + ".b", {co}, 0.0);
    ci = co;
  }
  add("enc.mu.w", {cfg_.d, ci, 1, 1, 1}, std::sqrt(1.0 / static_cast<double>(ci)));
  add("enc.mu.b", {cfg_.d}, 0.0);
  add("enc.ls.w", {cfg_.d, ci, 1, 1, 1}, std::sqrt(1.0 / static_cast<double>(ci)));
  add("enc.ls.b", {cfg_.d}, 0.0);

  if (cfg_.hyperbolic && cfg_.use_gyro) {
    Rng r(Rng::derive_seed(seed, fnv1a("dec.gyro")));
    gyro_ = nn::GyroConvParams::init(ci, 1, 1, cfg_.d, /*tied=*/false, r);
    params_.emplace_back("dec.gyro.a", gyro_.a);
    params_.emplace_back("dec.gyro.p", gyro_.p);
  } else {
    add("dec.in.w", {ci, cfg_.d, 1, 1, 1}, std::sqrt(2.0 / static_cast<double>(cfg_.d)));
    add("dec.in.b", {ci}, 0.0);
  }

  std::int64_t tci = ci;
  const std::int64_t outs[4] = {cfg_.filters[2], cfg_.filters[1], cfg_.filters[0], 1};
  for (int i = 0; i < 4; ++i) {
    const std::string base = "dec.tconv" + std::to_string(i + 1);
    const double gain = i == 3 ? 1.0 : 2.0;  // final layer is linear
    add(base + ".w", {tci, outs[i], k, k, k},
        std::sqrt(gain / static_cast<double>(tci * kc)));
    add(base + ".b", {outs[i]}, 0.0);
    tci = outs[i];
  }
}

Tensor Model::param(const std::string& name) const {
  for (const auto& [n, t] : params_) {
    if (n == name) return t;
  }
  throw Error("Model: unknown parameter " + name);
}

LatentState Model::encode(const Tensor& patch) const {
  const nn::Shape want{1, cfg_.m, cfg_.m, cfg_.m};
  if (patch.shape() != want) {
    throw ShapeError("encode: expected (1, m, m, m) patch with m = " +
                     std::to_string(cfg_.m) + ", got " + nn::shape_str(patch.shape()));
  }
  const std::int64_t pad = (cfg_.kernel - 1) / 2;
  Tensor h = patch;
  for (int i = 0; i < 4; ++i) {
    const std::string base = "enc.conv" + std::to_string(i + 1);
    h = nn::relu(nn::conv3d(h, param(base + ".w"), param(base + ".b"), 2, pad));
  }
  const Tensor mu_grid = nn::conv3d(h, param("enc.mu.w"), param("enc.mu.b"), 1, 0);
  const Tensor ls_grid = nn::conv3d(h, param("enc.ls.w"), param("enc.ls.b"), 1, 0);
  const Tensor mu_euc = nn::channels_to_rows(mu_grid);
  LatentState st;
  st.log_sigma = nn::channels_to_rows(ls_grid);
  st.mu = cfg_.hyperbolic ? nn::project_rows_to_ball(nn::exp0_rows(mu_euc)) : mu_euc;
  return st;
}

Tensor Model::sample_latent(const LatentState& st, Rng& rng) const {
  Tensor noise = Tensor::randn(st.mu.shape(), rng);
  return cfg_.hyperbolic ? stats::wrapped_sample_rows(st.mu, st.log_sigma, noise)
                         : stats::normal_sample_rows(st.mu, st.log_sigma, noise);
}

Tensor Model::decode(const Tensor& z) const {
  const std::int64_t g = cfg_.latent_grid;
  const nn::Shape want{g * g * g, cfg_.d};
  if (z.shape() != want) {
    throw ShapeError("decode: expected " + nn::shape_str(want) + " latent, got " +
                     nn::shape_str(z.shape()));
  }
  Tensor h;
  if (cfg_.hyperbolic && cfg_.use_gyro) {
    const Tensor grid = nn::rows_to_channels(z, g, g, g);
    h = nn::gyro_conv3d({grid}, gyro_, 1, 0, true);
  } else {
    const Tensor coords = cfg_.hyperbolic ? nn::log0_rows(z) : z;
    h = nn::conv3d(nn::rows_to_channels(coords, g, g, g), param("dec.in.w"),
                   param("dec.in.b"), 1, 0);
  }
  h = nn::relu(h);
  const std::int64_t pad = (cfg_.kernel - 1) / 2;
  for (int i = 0; i < 4; ++i) {
    const std::string base = "dec.tconv" + std::to_string(i + 1);
    h = nn::conv_transpose3d(h, param(base + ".w"), param(base + ".b"), 2, pad, 1);
    if (i < 3) h = nn::relu(h);
  }
  return h;
}

Tensor Model::recon_nll(const Tensor& patch, const Tensor& recon) const {
  if (patch.shape() != recon.shape()) {
    throw ShapeError("recon_nll: patch and reconstruction shapes differ");
  }
  const Tensor diff = patch - recon;
  return 0.5 * nn::sum(diff * diff);
}

Tensor Model::kl_term(const LatentState& st, const Tensor& z) const {
  const Tensor lq = cfg_.hyperbolic
                        ? stats::wrapped_log_prob_rows(st.mu, st.log_sigma, z)
                        : stats::normal_log_prob_rows(st.mu, st.log_sigma, z);
  const Tensor lp = cfg_.hyperbolic ? stats::wrapped_prior_log_prob_rows(z)
                                    : stats::normal_prior_log_prob_rows(z);
  return nn::mean(lq - lp);
}

Tensor Model::elbo_loss(const Tensor& patch, const LatentState& st, const Tensor& recon,
                        const std::vector<Tensor>& z_draws) const {
  if (z_draws.empty()) throw Error("elbo_loss: at least one latent draw required");
  Tensor kl = kl_term(st, z_draws[0]);
  for (std::size_t i = 1; i < z_draws.size(); ++i) kl = kl + kl_term(st, z_draws[i]);
  kl = kl / static_cast<double>(z_draws.size());
  return recon_nll(patch, recon) + kl;
}

Tensor Model::patch_embedding(const LatentState& st) const {
  if (st.mu.size(0) == 1) return st.mu;
  const double inv = 1.0 / static_cast<double>(st.mu.size(0));
  if (cfg_.hyperbolic) {
    return nn::exp0_rows(nn::mul_scalar(nn::col_sums(nn::log0_rows(st.mu)), inv));
  }
  return nn::mul_scalar(nn::col_sums(st.mu), inv);
}

std::vector<Tensor> Model::parameters() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& [name, t] : params_) out.push_back(t);
  return out;
}

void Model::constrain_parameters() {
  for (auto& [name, t] : params_) {
    if (name == "dec.gyro.p") nn::constrain_ball_rows(t);
  }
}

io::Checkpoint Model::to_checkpoint(const nn::Adam* opt, std::uint64_t rng_seed) const {
  io::Checkpoint ckpt;
  ckpt.config_json = cfg_.to_json();
  const auto to_named = [](const std::string& name, const nn::Shape& shape,
                           const std::vector<double>& data) {
    io::NamedTensor nt;
    nt.name = name;
    nt.dims = shape;
    nt.data.reserve(data.size());
    for (double v : data) nt.data.push_back(static_cast<float>(v));
    return nt;
  };
  for (const auto& [name, t] : params_) {
    ckpt.params.push_back(to_named(name, t.shape(), t.data()));
  }
  if (opt != nullptr) {
    if (opt->n_params() != params_.size()) {
      throw Error("to_checkpoint: optimizer does not match the parameter list");
    }
    for (std::size_t i = 0; i < params_.size(); ++i) {
      const auto& [name, t] = params_[i];
      ckpt.opt_state.push_back(to_named(name + ".m", t.shape(), opt->m(i)));
      ckpt.opt_state.push_back(to_named(name + ".v", t.shape(), opt->v(i)));
    }
    io::NamedTensor step;
    step.name = "adam.step";
    step.dims = {1};
    step.data = {static_cast<float>(opt->steps())};
    ckpt.opt_state.push_back(step);
  }
  ckpt.rng_seed = rng_seed;
  return ckpt;
}

Model Model::from_checkpoint(const io::Checkpoint& ckpt) {
  ModelConfig cfg;
  try {
    cfg = ModelConfig::from_json(ckpt.config_json);
    cfg.validate();
  } catch (const Error& e) {
    throw CheckpointMismatchError(std::string("checkpoint config invalid: ") + e.what());
  }
  Model m(cfg, 0);
  if (ckpt.params.size() != m.params_.size()) {
    throw CheckpointMismatchError("checkpoint holds " + std::to_string(ckpt.params.size()) +
                                  " parameters, model expects " +
                                  std::to_string(m.params_.size()));
  }
  for (auto& [name, t] : m.params_) {
    const io::NamedTensor* found = nullptr;
    for (const io::NamedTensor& nt : ckpt.params) {
      if (nt.name == name) {
        found = &nt;
        break;
      }
    }
    if (found == nullptr) {
      throw CheckpointMismatchError("checkpoint is missing parameter " + name);
    }
    if (found->dims != t.shape() ||
        found->data.size() != static_cast<std::size_t>(t.numel())) {
      throw CheckpointMismatchError("checkpoint shape mismatch for " + name);
    }
    std::vector<double>& dst = t.mutable_data();
    for (std::size_t i = 0; i < found->data.size(); ++i) {
      dst[i] = static_cast<double>(found->data[i]);
    }
  }
  return m;
}

void Model::load_optimizer_state(const io::Checkpoint& ckpt, nn::Adam& opt) const {
  if (opt.n_params() != params_.size()) {
    throw CheckpointMismatchError("optimizer does not match the parameter list");
  }
  const auto find = [&](const std::string& name) -> const io::NamedTensor& {
    for (const io::NamedTensor& nt : ckpt.opt_state) {
      if (nt.name == name) return nt;
    }
    throw CheckpointMismatchError("checkpoint is missing optimizer entry " + name);
  };
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& [name, t] = params_[i];
    const io::NamedTensor& m = find(name + ".m");
    const io::NamedTensor& v = find(name + ".v");
    if (m.dims != t.shape() || v.dims != t.shape()) {
      throw CheckpointMismatchError("optimizer shape mismatch for " + name);
    }
    std::vector<double> md(m.data.begin(), m.data.end());
    std::vector<double> vd(v.data.begin(), v.data.end());
    opt.load_state(i, std::move(md), std::move(vd));
  }
  const io::NamedTensor& step = find("adam.step");
  if (step.data.size() != 1) throw CheckpointMismatchError("malformed adam.step entry");
  opt.set_steps(static_cast<std::int64_t>(step.data[0]));
}

double triplet_loss(const geometry::BallPoint& mu, const geometry::BallPoint& mu_pos,
                    const geometry::BallPoint& mu_neg, double alpha) {
  if (alpha < 0.0) throw Error("triplet_loss: alpha must be >= 0");
  const double dp = geometry::distance(mu, mu_pos);
  const double dn = geometry::distance(mu, mu_neg);
  return std::max(0.0, dp - dn + alpha);
}

Tensor triplet_loss_rows(const Tensor& mu, const Tensor& mu_pos, const Tensor& mu_neg,
                         double alpha, bool euclidean) {
  if (alpha < 0.0) throw Error("triplet_loss_rows: alpha must be >= 0");
  Tensor dp, dn;
  if (euclidean) {
    const Tensor a = mu - mu_pos;
    const Tensor b = mu - mu_neg;
    dp = nn::sqrt(nn::clamp_min(nn::rows_norm_sq(a), 1e-24));
    dn = nn::sqrt(nn::clamp_min(nn::rows_norm_sq(b), 1e-24));
  } else {
    dp = nn::distance_rows(mu, mu_pos);
    dn = nn::distance_rows(mu, mu_neg);
  }
  return nn::reshape(nn::relu(dp - dn + alpha), {1});
}

double total_loss(double elbo, double triplet, double beta) {
  if (beta < 0.0) throw Error("total_loss: beta must be >= 0");
  return elbo + beta * triplet;
}

Tensor total_loss(const Tensor& elbo, const Tensor& triplet, double beta) {
  if (beta < 0.0) throw Error("total_loss: beta must be >= 0");
  return elbo + nn::mul_scalar(nn::reshape(triplet, {1}), beta);
}

namespace {

void assert_in_ball(const Tensor& mu) {
  const std::int64_t n = mu.size(0);
  const std::int64_t d = mu.size(1);
  const std::vector<double>& v = mu.data();
  for (std::int64_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::int64_t j = 0; j < d; ++j) {
      const double x = v[static_cast<std::size_t>(i * d + j)];
      sq += x * x;
    }
    if (!(sq < 1.0)) {
      throw NonFiniteError("training produced a posterior mean outside the unit ball");
    }
  }
}

}  // namespace

TrainResult train(const std::vector<Volume>& volumes, const ModelConfig& mcfg,
                  const TrainConfig& tcfg) {
  if (volumes.empty()) throw EmptyDatasetError("train: no training volumes");
  mcfg.validate();
  sampler::validate(tcfg.sampler);
  if (tcfg.epochs < 1) throw Error("train: epochs must be >= 1");

  std::vector<Volume> std_vols;
  std_vols.reserve(volumes.size());
  for (const Volume& v : volumes) std_vols.push_back(pipeline::standardize(v));

  Model net(mcfg, Rng::derive_seed(tcfg.seed, 1));
  nn::Adam opt(net.parameters(), tcfg.adam);
  Rng rng(Rng::derive_seed(tcfg.seed, 2));

  TrainResult res;
  std::ostringstream log;
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    double sum_elbo = 0.0, sum_triplet = 0.0, sum_total = 0.0;
    std::int64_t count = 0;
    for (const Volume& vol : std_vols) {
      const sampler::Dims dims{vol.nx, vol.ny, vol.nz};
      for (int a = 0; a < tcfg.sampler.anchors_per_volume; ++a) {
        const sampler::Triplet trip = sampler::sample_triplet(dims, tcfg.sampler, rng);
        const Tensor xa =
            pipeline::resize_patch(pipeline::patch_to_tensor(vol, trip.anchor), mcfg.m);
        const LatentState sa = net.encode(xa);
        if (mcfg.hyperbolic) assert_in_ball(sa.mu);

        std::vector<Tensor> zs;
        zs.reserve(static_cast<std::size_t>(mcfg.kl_samples));
        for (int s = 0; s < mcfg.kl_samples; ++s) zs.push_back(net.sample_latent(sa, rng));
        const Tensor recon = net.decode(zs[0]);
        const Tensor elbo = net.elbo_loss(xa, sa, recon, zs);

        Tensor triplet;
        if (mcfg.use_triplet) {
          const Tensor xp = pipeline::resize_patch(
              pipeline::patch_to_tensor(vol, trip.positive), mcfg.m);
          const Tensor xn = pipeline::resize_patch(
              pipeline::patch_to_tensor(vol, trip.negative), mcfg.m);
          const LatentState sp = net.encode(xp);
          const LatentState sn = net.encode(xn);
          if (mcfg.hyperbolic) {
            assert_in_ball(sp.mu);
            assert_in_ball(sn.mu);
          }
          triplet = triplet_loss_rows(net.patch_embedding(sa), net.patch_embedding(sp),
                                      net.patch_embedding(sn), mcfg.alpha,
                                      !mcfg.hyperbolic);
        } else {
          triplet = Tensor::scalar(0.0);
        }
        Tensor total = total_loss(elbo, triplet, mcfg.use_triplet ? mcfg.beta : 0.0);

        const double total_v = total.item();
        const double elbo_v = elbo.item();
        const double triplet_v = triplet.item();
        if (!std::isfinite(total_v)) {
          throw NonFiniteError("train: non-finite loss at epoch " + std::to_string(epoch) +
                               ", step " + std::to_string(step) +
                               " (elbo = " + std::to_string(elbo_v) +
                               ", triplet = " + std::to_string(triplet_v) + ")");
        }

        opt.zero_grad();
        total.backward();
        opt.step();
        net.constrain_parameters();

        nlohmann::json line;
        line["epoch"] = epoch;
        line["step"] = step;
        line["elbo"] = elbo_v;
        line["triplet"] = triplet_v;
        line["total"] = total_v;
        log << line.dump() << "\n";

        sum_elbo += elbo_v;
        sum_triplet += triplet_v;
        sum_total += total_v;
        ++count;
        ++step;
      }
    }
    const double inv = count > 0 ? 1.0 / static_cast<double>(count) : 0.0;
    res.epoch_elbo.push_back(sum_elbo * inv);
    res.epoch_triplet.push_back(sum_triplet * inv);
    res.epoch_total.push_back(sum_total * inv);
  }

  res.checkpoint = net.to_checkpoint(&opt, tcfg.seed);
  res.loss_log = log.str();
  if (!tcfg.loss_log_path.empty()) io::write_text_file(tcfg.loss_log_path, res.loss_log);
  return res;
}

namespace {

std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& key) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoll(item, &pos));
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error("config key '" + key + "': '" + item + "' is not an integer");
    }
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(const io::ConfigMap& cfg) {
  static const std::set<std::string> known = {
      "m",        "d",          "filters",      "kernel",
      "beta",     "alpha",      "latent_grid",  "hyperbolic",
      "use_gyro", "use_triplet", "kl_samples",
      "epochs",   "lr",         "adam_beta1",   "adam_beta2",   "adam_eps",
      "r_min",    "r_max",      "l_min",        "r_gap",        "scheme",
      "anchors_per_volume", "max_reject", "min_center_dist"};
  for (const auto& [key, value] : cfg) {
    (void)value;
    if (known.find(key) == known.end()) throw Error("unknown config key: " + key);
  }

  RunConfig rc;
  ModelConfig& mcfg = rc.model;
  TrainConfig& tcfg = rc.train;

  mcfg.m = io::config_get_int(cfg, "m", mcfg.m);
  mcfg.d = io::config_get_int(cfg, "d", mcfg.d);
  if (cfg.count("filters")) mcfg.filters = parse_int_list(cfg.at("filters"), "filters");
  mcfg.kernel = io::config_get_int(cfg, "kernel", mcfg.kernel);
  mcfg.beta = io::config_get_double(cfg, "beta", mcfg.beta);
  mcfg.alpha = io::config_get_double(cfg, "alpha", mcfg.alpha);
  mcfg.latent_grid = io::config_get_int(cfg, "latent_grid", mcfg.m / 16);
  mcfg.hyperbolic = io::config_get_bool(cfg, "hyperbolic", mcfg.hyperbolic);
  mcfg.use_gyro = io::config_get_bool(cfg, "use_gyro", mcfg.use_gyro && mcfg.hyperbolic);
  mcfg.use_triplet = io::config_get_bool(cfg, "use_triplet", mcfg.use_triplet);
  mcfg.kl_samples = static_cast<int>(io::config_get_int(cfg, "kl_samples", mcfg.kl_samples));

  tcfg.epochs = static_cast<int>(io::config_get_int(cfg, "epochs", tcfg.epochs));
  tcfg.adam.lr = io::config_get_double(cfg, "lr", tcfg.adam.lr);
  tcfg.adam.beta1 = io::config_get_double(cfg, "adam_beta1", tcfg.adam.beta1);
  tcfg.adam.beta2 = io::config_get_double(cfg, "adam_beta2", tcfg.adam.beta2);
  tcfg.adam.eps = io::config_get_double(cfg, "adam_eps", tcfg.adam.eps);

  sampler::SamplerConfig& s = tcfg.sampler;
  s.r_min = static_cast<int>(io::config_get_int(cfg, "r_min", s.r_min));
  s.r_max = static_cast<int>(io::config_get_int(cfg, "r_max", s.r_max));
  s.l_min = static_cast<int>(io::config_get_int(cfg, "l_min", s.l_min));
  s.r_gap = static_cast<int>(io::config_get_int(cfg, "r_gap", s.r_gap));
  const std::string scheme = io::config_get(
      cfg, "scheme", s.scheme == sampler::Scheme::kUniform ? "uniform" : "log_uniform");
  if (scheme == "uniform") {
    s.scheme = sampler::Scheme::kUniform;
  } else if (scheme == "log_uniform") {
    s.scheme = sampler::Scheme::kLogUniform;
  } else {
    throw Error("config key 'scheme': expected uniform or log_uniform, got '" + scheme +
                "'");
  }
  s.anchors_per_volume =
      static_cast<int>(io::config_get_int(cfg, "anchors_per_volume", s.anchors_per_volume));
  s.max_reject = static_cast<int>(io::config_get_int(cfg, "max_reject", s.max_reject));
  s.min_center_dist = io::config_get_double(cfg, "min_center_dist", s.min_center_dist);
  return rc;
}

}  // namespace hyperseg::model
