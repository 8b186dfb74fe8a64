#include "cortexkit/fed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cortexkit/bold_augment.hpp"
#include "cortexkit/construct.hpp"
#include "cortexkit/errors.hpp"

namespace cortexkit::fed {

Strategy parse_strategy(const std::string& name) {
  if (name == "fedavg") return Strategy::fedavg;
  if (name == "fedprox") return Strategy::fedprox;
  if (name == "moon") return Strategy::moon;
  if (name == "lgfedavg") return Strategy::lgfedavg;
  if (name == "pfedme") return Strategy::pfedme;
  if (name == "single") return Strategy::single;
  if (name == "mix") return Strategy::mix;
  throw ConfigError("unknown federated strategy '" + name + "'");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::fedavg: return "fedavg";
    case Strategy::fedprox: return "fedprox";
    case Strategy::moon: return "moon";
    case Strategy::lgfedavg: return "lgfedavg";
    case Strategy::pfedme: return "pfedme";
    case Strategy::single: return "single";
    case Strategy::mix: return "mix";
  }
  return "?";
}

void validate(const FedConfig& cfg) {
  if (cfg.rounds < 1) throw ConfigError("rounds must be at least 1");
  if (!(cfg.mu >= 0.0)) throw ConfigError("mu must be non-negative");
  if (cfg.strategy == Strategy::pfedme && !(cfg.mu > 0.0)) throw ConfigError("pfedme needs mu > 0");
  if (!(cfg.moon_weight >= 0.0)) throw ConfigError("moon_weight must be non-negative");
  if (!(cfg.moon_temp > 0.0)) throw ConfigError("moon_temp must be positive");
  if (cfg.hidden < 1) throw ConfigError("hidden width must be at least 1");
  if (cfg.folds < 2) throw ConfigError("folds must be at least 2");
  if (!(cfg.pfedme_inner_lr > 0.0)) throw ConfigError("pfedme_inner_lr must be positive");
  if (!(cfg.pfedme_beta > 0.0 && cfg.pfedme_beta <= 1.0)) throw ConfigError("pfedme_beta must lie in (0, 1]");
}

// ---- losses -------------------------------------------------------------

namespace {

double checked_norm(std::span<const double> v, const char* what) {
  const double n = norm2(v);
  if (!(n > 0.0)) throw ValueError(std::string(what) + " has zero norm");
  return n;
}

}  // namespace

double neg_cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("cosine of vectors with different lengths");
  return -dot(a, b) / (checked_norm(a, "first vector") * checked_norm(b, "second vector"));
}

std::vector<double> neg_cosine_grad_b(std::span<const double> a, std::span<const double> b) {
  const double na = checked_norm(a, "first vector"), nb = checked_norm(b, "second vector");
  const double ab = dot(a, b);
  std::vector<double> g(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) g[i] = -(a[i] / (na * nb) - ab * b[i] / (na * nb * nb * nb));
  return g;
}

SimSiamLoss simsiam_loss(std::span<const double> z1, std::span<const double> z2, std::span<const double> p1,
                         std::span<const double> p2) {
  SimSiamLoss out;
  out.loss = neg_cosine(z1, p2) + neg_cosine(z2, p1);
  out.grad_p2 = neg_cosine_grad_b(z1, p2);
  out.grad_p1 = neg_cosine_grad_b(z2, p1);
  out.grad_z1.assign(z1.size(), 0.0);
  out.grad_z2.assign(z2.size(), 0.0);
  return out;
}

nn::ForwardBackward fedprox_loss_grad(const nn::ModelState& local, const nn::ModelState& global, const Matrix& x,
                                      std::span<const double> y, double mu) {
  if (local.params.size() != global.params.size()) throw DimensionError("local and global models differ in size");
  auto fb = nn::mlp_forward_backward(local, x, y);
  for (std::size_t i = 0; i < local.params.size(); ++i) {
    const double diff = local.params[i] - global.params[i];
    fb.loss += 0.5 * mu * diff * diff;
    fb.grad[i] += mu * diff;
  }
  return fb;
}

std::pair<double, Matrix> moon_term(const Matrix& z, const Matrix& z_global, const Matrix& z_prev, double weight,
                                    double temp) {
  const std::size_t b = z.rows(), h = z.cols();
  Matrix grad(b, h);
  double total = 0.0;
  const double scale = weight / static_cast<double>(b);
  for (std::size_t r = 0; r < b; ++r) {
    const auto zr = z.row(r), g = z_global.row(r), p = z_prev.row(r);
    // cos(z, a) = -Phi(a, z); its gradient in z is -grad_b Phi(a, z).
    const double sg = -neg_cosine(g, zr), sp = -neg_cosine(p, zr);
    const double lg = sg / temp, lp = sp / temp;
    const double top = std::max(lg, lp);
    const double lse = top + std::log(std::exp(lg - top) + std::exp(lp - top));
    total += (lse - lg) * scale;
    const double wg = std::exp(lg - lse), wp = std::exp(lp - lse);
    // d/dz of lse - lg = (wg - 1) dlg + wp dlp
    const auto dg = neg_cosine_grad_b(g, zr);
    const auto dp = neg_cosine_grad_b(p, zr);
    for (std::size_t k = 0; k < h; ++k) {
      grad(r, k) = scale * ((wg - 1.0) * -dg[k] / temp + wp * -dp[k] / temp);
    }
  }
  return {total, grad};
}

nn::ForwardBackward moon_loss_grad(const nn::ModelState& local, const nn::ModelState& global,
                                   const nn::ModelState& previous, const Matrix& x, std::span<const double> y,
                                   double weight, double temp) {
  const Matrix zg = nn::mlp_represent(global, x);
  const Matrix zp = nn::mlp_represent(previous, x);
  return nn::mlp_forward_backward(local, x, y, [&](const Matrix& z) { return moon_term(z, zg, zp, weight, temp); });
}

// ---- pFedMe -------------------------------------------------------------

std::vector<double> prox_solve(const GradientFn& grad_f, std::span<const double> w, std::span<const double> theta0,
                               double mu, double lr, std::size_t iters) {
  if (!(mu > 0.0)) throw ValueError("pFedMe proximal weight mu must be positive");
  if (w.size() != theta0.size()) throw DimensionError("theta and w differ in size");
  std::vector<double> theta(theta0.begin(), theta0.end());
  for (std::size_t it = 0; it < iters; ++it) {
    const auto g = grad_f(theta);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * (g[i] + mu * (theta[i] - w[i]));
  }
  return theta;
}

PfedmeStep pfedme_local(const GradientFn& grad_f, std::span<const double> w, std::span<const double> theta0, double mu,
                        double eta, double inner_lr, std::size_t inner_iters) {
  PfedmeStep step;
  step.theta = prox_solve(grad_f, w, theta0, mu, inner_lr, inner_iters);
  step.w.assign(w.begin(), w.end());
  for (std::size_t i = 0; i < w.size(); ++i) step.w[i] -= eta * mu * (w[i] - step.theta[i]);
  return step;
}

// ---- local update and aggregation ----------------------------------------

std::uint64_t upload_bytes(Strategy s, const nn::ModelState& m) {
  switch (s) {
    case Strategy::single:
    case Strategy::mix: return 0;
    case Strategy::lgfedavg: return m.head_size() * sizeof(double);
    default: return m.params.size() * sizeof(double);
  }
}

LocalResult local_update(const SiteShard& shard, const Matrix& x, std::span<const double> y, nn::ModelState start,
                         const LocalContext& ctx, const SeededRng& rng) {
  if (x.cols() != start.in_dim) {
    throw DimensionError("site " + shard.site_id + " has " + std::to_string(x.cols()) + " features, model expects " +
                         std::to_string(start.in_dim));
  }
  const bool needs_global = ctx.strategy == Strategy::fedprox || ctx.strategy == Strategy::moon;
  if (needs_global && (!ctx.global || ctx.global->params.size() != start.params.size())) {
    throw DimensionError("global model missing or of a different shape");
  }
  if (ctx.strategy == Strategy::moon && (!ctx.previous || ctx.previous->params.size() != start.params.size())) {
    throw DimensionError("previous local model missing or of a different shape");
  }

  LocalResult res;
  res.personalized = start;
  const double lr = shard.lr;
  nn::BatchStep step;
  switch (ctx.strategy) {
    case Strategy::fedprox:
      // Implicit (proximal) step on the quadratic term, stable for any mu:
      // w <- argmin_v |v - (w - lr g)|^2 / (2 lr) + mu/2 |v - w_g|^2.
      step = [&](nn::ModelState& m, const Matrix& xb, std::span<const double> yb) {
        const auto ce = nn::mlp_forward_backward(m, xb, yb);
        const double denom = 1.0 + lr * ctx.mu;
        double loss = ce.loss;
        for (std::size_t i = 0; i < m.params.size(); ++i) {
          const double diff = m.params[i] - ctx.global->params[i];
          loss += 0.5 * ctx.mu * diff * diff;
          m.params[i] = (m.params[i] - lr * ce.grad[i] + lr * ctx.mu * ctx.global->params[i]) / denom;
        }
        return loss;
      };
      break;
    case Strategy::moon:
      step = [&](nn::ModelState& m, const Matrix& xb, std::span<const double> yb) {
        const auto fb = moon_loss_grad(m, *ctx.global, *ctx.previous, xb, yb, ctx.moon_weight, ctx.moon_temp);
        for (std::size_t i = 0; i < m.params.size(); ++i) m.params[i] -= lr * fb.grad[i];
        return fb.loss;
      };
      break;
    case Strategy::pfedme:
      step = [&](nn::ModelState& m, const Matrix& xb, std::span<const double> yb) {
        nn::ModelState probe = m;
        const GradientFn grad_f = [&](std::span<const double> theta) {
          std::copy(theta.begin(), theta.end(), probe.params.begin());
          return nn::mlp_forward_backward(probe, xb, yb).grad;
        };
        auto s = pfedme_local(grad_f, m.params, res.personalized.params, ctx.mu, lr, ctx.inner_lr, ctx.inner_iters);
        res.personalized.params = std::move(s.theta);
        m.params = std::move(s.w);
        return nn::mlp_forward_backward(res.personalized, xb, yb).loss;
      };
      break;
    default: step = nn::sgd_step(lr);
  }

  res.state = std::move(start);
  double loss = 0.0;
  for (std::size_t e = 0; e < shard.local_epochs; ++e) {
    SeededRng epoch_rng = rng.fork("epoch:" + std::to_string(ctx.first_epoch + e));
    loss += nn::run_epoch(res.state, x, y, shard.batch, epoch_rng, step);
  }
  res.loss = shard.local_epochs ? loss / static_cast<double>(shard.local_epochs) : 0.0;
  res.bytes_out = upload_bytes(ctx.strategy, res.state);
  return res;
}

nn::ModelState aggregate(Strategy s, const std::vector<SiteUpdate>& sites, const nn::ModelState& global, double beta) {
  if (sites.empty()) throw ValueError("aggregation needs at least one site");
  if (s == Strategy::single || s == Strategy::mix) throw ConfigError(to_string(s) + " does not aggregate");
  std::size_t total = 0;
  for (const auto& site : sites) {
    if (site.state.params.size() != global.params.size()) throw DimensionError("site " + site.site_id + " model shape differs");
    total += site.n_samples;
  }
  if (total == 0) throw ValueError("aggregation weights sum to zero");

  std::vector<std::size_t> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sites[a].site_id < sites[b].site_id; });

  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  if (s == Strategy::lgfedavg) {
    for (const auto& name : global.head_layers()) {
      const auto& span = global.layer(name);
      ranges.emplace_back(span.offset, span.offset + span.size);
    }
  } else {
    ranges.emplace_back(0, global.params.size());
  }

  nn::ModelState out = global;
  for (auto [lo, hi] : ranges) {
    for (std::size_t i = lo; i < hi; ++i) {
      double acc = 0.0;
      for (std::size_t k : order) {
        acc += static_cast<double>(sites[k].n_samples) / static_cast<double>(total) * sites[k].state.params[i];
      }
      out.params[i] = s == Strategy::pfedme ? (1.0 - beta) * global.params[i] + beta * acc : acc;
    }
  }
  return out;
}

// ---- orchestration --------------------------------------------------------

std::uint64_t FedTrace::total_bytes() const {
  std::uint64_t total = 0;
  for (const auto& r : rows) total += r.bytes;
  return total;
}

namespace {

struct SiteFold {
  Matrix x_train, x_val;
  std::vector<double> y_train, y_val;
};

nn::ModelState with_head(nn::ModelState local, const nn::ModelState& global) {
  for (const auto& name : global.head_layers()) {
    const auto src = global.view(name);
    std::copy(src.begin(), src.end(), local.view(name).begin());
  }
  return local;
}

void check_shards(const std::vector<SiteShard>& shards) {
  if (shards.empty()) throw ConfigError("federation needs at least one site");
  std::set<std::string> ids;
  for (const auto& s : shards) {
    if (!ids.insert(s.site_id).second) throw ConfigError("duplicate site id '" + s.site_id + "'");
    if (s.dataset.size() == 0) throw ConfigError("site " + s.site_id + " has no samples");
    if (s.dataset.task != ml::Task::classification) throw ConfigError("federation supports classification only");
    if (!(s.lr > 0.0)) throw ConfigError("site " + s.site_id + " needs lr > 0");
    if (s.batch == 0) throw ConfigError("site " + s.site_id + " needs batch >= 1");
    if (s.dataset.features.cols() != shards.front().dataset.features.cols()) {
      throw ConfigError("site " + s.site_id + " feature width differs from site " + shards.front().site_id);
    }
    try {
      ml::validate(s.dataset);
    } catch (const Error& e) {
      throw ConfigError("site " + s.site_id + ": " + e.what());
    }
  }
}

}  // namespace

FedResult run_federation(const FedConfig& cfg, const std::vector<SiteShard>& shards) {
  validate(cfg);
  check_shards(shards);
  const std::size_t n_sites = shards.size();
  const std::size_t dims = shards.front().dataset.features.cols();
  std::size_t classes = 2;
  for (const auto& s : shards) classes = std::max(classes, s.dataset.n_classes());

  const SeededRng root(cfg.seed, "pipeline");
  std::vector<SeededRng> site_rng;
  std::vector<std::vector<ml::Split>> splits;
  for (const auto& s : shards) {
    site_rng.push_back(root.fork("site:" + s.site_id));
    SeededRng folds = site_rng.back().fork("folds");
    splits.push_back(ml::partition_stratified(s.dataset.targets, cfg.folds, folds));
  }

  FedResult result;
  std::vector<double> fold_loss(cfg.rounds * n_sites, 0.0);
  std::vector<std::uint64_t> fold_bytes(cfg.rounds * n_sites, 0);
  std::vector<std::vector<double>> truth(n_sites), scores(n_sites), labels(n_sites);

  for (std::size_t f = 0; f < cfg.folds; ++f) {
    const std::string tag = "fold:" + std::to_string(f);
    std::vector<SiteFold> data(n_sites);
    for (std::size_t s = 0; s < n_sites; ++s) {
      const auto train = shards[s].dataset.subset(splits[s][f].train);
      const auto val = shards[s].dataset.subset(splits[s][f].validation);
      const auto z = ml::Standardizer::fit(train.features);
      data[s] = {z.transform(train.features), z.transform(val.features), train.targets, val.targets};
    }
    nn::ModelState init = nn::make_mlp(dims, cfg.hidden, classes);
    SeededRng init_rng = root.fork("init").fork(tag);
    nn::init_mlp(init, init_rng);

    nn::ModelState global = init;
    std::vector<nn::ModelState> local(n_sites, init), personal(n_sites, init);
    std::vector<SeededRng> train_rng;
    for (std::size_t s = 0; s < n_sites; ++s) train_rng.push_back(site_rng[s].fork(tag));

    // Mix pools every site's standardized training fold.
    SiteShard mix_shard = shards.front();
    mix_shard.site_id = "mix";
    Matrix mix_x;
    std::vector<double> mix_y;
    if (cfg.strategy == Strategy::mix) {
      std::size_t rows = 0;
      for (const auto& d : data) rows += d.x_train.rows();
      mix_x = Matrix(rows, dims);
      std::size_t r = 0;
      for (const auto& d : data) {
        for (std::size_t i = 0; i < d.x_train.rows(); ++i, ++r)
          std::copy(d.x_train.row(i).begin(), d.x_train.row(i).end(), mix_x.row(r).begin());
        mix_y.insert(mix_y.end(), d.y_train.begin(), d.y_train.end());
      }
    }
    const SeededRng mix_rng = root.fork("site:mix").fork(tag);

    auto eval_model = [&](std::size_t s) -> nn::ModelState {
      switch (cfg.strategy) {
        case Strategy::single: return local[s];
        case Strategy::lgfedavg: return with_head(local[s], global);
        case Strategy::pfedme: return personal[s];
        default: return global;
      }
    };

    std::vector<std::vector<double>> snapshots;
    for (std::size_t r = 0; r < cfg.rounds; ++r) {
      std::vector<SiteUpdate> updates;
      if (cfg.strategy == Strategy::mix) {
        LocalContext ctx{Strategy::mix};
        ctx.first_epoch = r * mix_shard.local_epochs;
        global = local_update(mix_shard, mix_x, mix_y, global, ctx, mix_rng).state;
      } else {
        for (std::size_t s = 0; s < n_sites; ++s) {
          LocalContext ctx;
          ctx.strategy = cfg.strategy;
          ctx.global = &global;
          ctx.previous = &local[s];
          ctx.mu = cfg.mu;
          ctx.moon_weight = cfg.moon_weight;
          ctx.moon_temp = cfg.moon_temp;
          ctx.inner_iters = cfg.pfedme_inner_iters;
          ctx.inner_lr = cfg.pfedme_inner_lr;
          ctx.first_epoch = r * shards[s].local_epochs;
          nn::ModelState start = global;
          if (cfg.strategy == Strategy::single) start = local[s];
          else if (cfg.strategy == Strategy::lgfedavg) start = with_head(local[s], global);
          if (cfg.strategy == Strategy::moon && r == 0) ctx.previous = &global;
          LocalResult res = local_update(shards[s], data[s].x_train, data[s].y_train, std::move(start), ctx, train_rng[s]);
          fold_bytes[r * n_sites + s] += res.bytes_out;
          local[s] = res.state;
          if (cfg.strategy == Strategy::pfedme) personal[s] = std::move(res.personalized);
          if (cfg.strategy != Strategy::single) updates.push_back({shards[s].site_id, data[s].y_train.size(), std::move(res.state)});
        }
        if (!updates.empty()) global = aggregate(cfg.strategy, updates, global, cfg.pfedme_beta);
      }
      for (std::size_t s = 0; s < n_sites; ++s) {
        const auto m = eval_model(s);
        fold_loss[r * n_sites + s] += nn::mlp_forward_backward(m, data[s].x_train, data[s].y_train).loss /
                                      static_cast<double>(cfg.folds);
      }
      snapshots.push_back(cfg.strategy == Strategy::single ? std::vector<double>{} : global.params);
    }
    result.trace.global_params.push_back(std::move(snapshots));

    std::vector<nn::ModelState> finals;
    for (std::size_t s = 0; s < n_sites; ++s) {
      finals.push_back(eval_model(s));
      const Matrix proba = nn::mlp_predict_proba(finals.back(), data[s].x_val);
      for (std::size_t i = 0; i < proba.rows(); ++i) {
        const auto row = proba.row(i);
        truth[s].push_back(data[s].y_val[i]);
        labels[s].push_back(static_cast<double>(std::max_element(row.begin(), row.end()) - row.begin()));
        scores[s].push_back(row[1]);
      }
    }
    result.final_models.push_back(std::move(finals));
  }

  std::vector<std::uint64_t> cumulative(n_sites, 0);
  for (std::size_t r = 0; r < cfg.rounds; ++r)
    for (std::size_t s = 0; s < n_sites; ++s) {
      const std::size_t k = r * n_sites + s;
      cumulative[s] += fold_bytes[k];
      result.trace.rows.push_back({r + 1, shards[s].site_id, fold_loss[k], fold_bytes[k], cumulative[s]});
    }

  std::vector<double> all_truth, all_scores, all_labels;
  for (std::size_t s = 0; s < n_sites; ++s) {
    result.site_reports[shards[s].site_id] = ml::evaluate(truth[s], scores[s], labels[s], ml::Task::classification);
    all_truth.insert(all_truth.end(), truth[s].begin(), truth[s].end());
    all_scores.insert(all_scores.end(), scores[s].begin(), scores[s].end());
    all_labels.insert(all_labels.end(), labels[s].begin(), labels[s].end());
  }
  result.average = ml::evaluate(all_truth, all_scores, all_labels, ml::Task::classification);
  return result;
}

// ---- contrastive pretraining ----------------------------------------------

std::vector<double> connectivity_features(const TimeSeries& ts) {
  const Matrix c = construct::correlation_matrix(ts.values());
  std::vector<double> out;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = i + 1; j < c.cols(); ++j) out.push_back(c(i, j));
  return out;
}

namespace {

// Predictor p = W_b tanh(W_a z + b_a) + b_b, stored in an mlp1 layout.
struct PredictorPass {
  std::vector<double> hidden, out;
};

PredictorPass predictor_forward(const nn::ModelState& m, std::span<const double> z) {
  PredictorPass p;
  const auto wa = m.view("encoder.weight"), ba = m.view("encoder.bias");
  const auto wb = m.view("head.weight"), bb = m.view("head.bias");
  p.hidden.resize(m.hidden);
  for (std::size_t k = 0; k < m.hidden; ++k) p.hidden[k] = std::tanh(ba[k] + dot(wa.subspan(k * m.in_dim, m.in_dim), z));
  p.out.resize(m.out_dim);
  for (std::size_t c = 0; c < m.out_dim; ++c) p.out[c] = bb[c] + dot(wb.subspan(c * m.hidden, m.hidden), p.hidden);
  return p;
}

// Accumulates parameter gradients into `grad` and returns dL/dz.
std::vector<double> predictor_backward(const nn::ModelState& m, std::span<const double> z, const PredictorPass& p,
                                       std::span<const double> dout, std::vector<double>& grad) {
  const auto wa = m.view("encoder.weight"), wb = m.view("head.weight");
  double* gwa = grad.data() + m.layer("encoder.weight").offset;
  double* gba = grad.data() + m.layer("encoder.bias").offset;
  double* gwb = grad.data() + m.layer("head.weight").offset;
  double* gbb = grad.data() + m.layer("head.bias").offset;
  std::vector<double> dh(m.hidden, 0.0), dz(m.in_dim, 0.0);
  for (std::size_t c = 0; c < m.out_dim; ++c) {
    gbb[c] += dout[c];
    for (std::size_t k = 0; k < m.hidden; ++k) {
      gwb[c * m.hidden + k] += dout[c] * p.hidden[k];
      dh[k] += dout[c] * wb[c * m.hidden + k];
    }
  }
  for (std::size_t k = 0; k < m.hidden; ++k) {
    const double da = dh[k] * (1.0 - p.hidden[k] * p.hidden[k]);
    gba[k] += da;
    for (std::size_t q = 0; q < m.in_dim; ++q) {
      gwa[k * m.in_dim + q] += da * z[q];
      dz[q] += da * wa[k * m.in_dim + q];
    }
  }
  return dz;
}

void encoder_backward(const nn::ModelState& m, std::span<const double> x, std::span<const double> z,
                      std::span<const double> dz, std::vector<double>& grad) {
  double* gw = grad.data() + m.layer("encoder.weight").offset;
  double* gb = grad.data() + m.layer("encoder.bias").offset;
  for (std::size_t k = 0; k < m.hidden; ++k) {
    const double da = dz[k] * (1.0 - z[k] * z[k]);
    gb[k] += da;
    for (std::size_t q = 0; q < m.in_dim; ++q) gw[k * m.in_dim + q] += da * x[q];
  }
}

}  // namespace

PretrainResult pretrain(const std::vector<TimeSeries>& corpus, std::size_t epochs, std::uint64_t seed,
                        std::size_t hidden, double lr) {
  if (corpus.empty()) throw ValueError("pretraining corpus is empty");
  std::vector<std::pair<std::vector<double>, std::vector<double>>> views;
  for (const auto& ts : corpus) {
    if (ts.regions() < 2) throw DimensionError("pretraining needs at least 2 regions per subject");
    if (ts.regions() != corpus.front().regions()) throw DimensionError("pretraining subjects differ in region count");
    auto [a, b] = bold::pretrain_pair(ts);
    views.emplace_back(connectivity_features(a), connectivity_features(b));
  }
  const std::size_t d = views.front().first.size();

  const SeededRng rng(seed, "pretrain");
  PretrainResult res;
  res.encoder = nn::make_mlp(d, hidden, 2);
  res.predictor = nn::make_mlp(hidden, hidden, hidden);
  SeededRng init = rng.fork("init");
  nn::init_mlp(res.encoder, init);
  for (double& w : res.encoder.view("head.weight")) w = 0.0;
  nn::init_mlp(res.predictor, init);

  std::vector<std::size_t> order(views.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t e = 0; e < epochs; ++e) {
    SeededRng epoch_rng = rng.fork("epoch:" + std::to_string(e));
    epoch_rng.shuffle(std::span<std::size_t>(order));
    double epoch_total = 0.0;
    for (std::size_t i : order) {
      const auto& [x1, x2] = views[i];
      const Matrix z1m = nn::mlp_represent(res.encoder, Matrix(1, d, x1));
      const Matrix z2m = nn::mlp_represent(res.encoder, Matrix(1, d, x2));
      const auto z1 = z1m.row(0), z2 = z2m.row(0);
      const auto p1 = predictor_forward(res.predictor, z1);
      const auto p2 = predictor_forward(res.predictor, z2);
      const auto loss = simsiam_loss(z1, z2, p1.out, p2.out);

      std::vector<double> g_pred(res.predictor.params.size(), 0.0), g_enc(res.encoder.params.size(), 0.0);
      const auto dz1 = predictor_backward(res.predictor, z1, p1, loss.grad_p1, g_pred);
      const auto dz2 = predictor_backward(res.predictor, z2, p2, loss.grad_p2, g_pred);
      encoder_backward(res.encoder, x1, z1, dz1, g_enc);
      encoder_backward(res.encoder, x2, z2, dz2, g_enc);
      for (std::size_t k = 0; k < g_pred.size(); ++k) res.predictor.params[k] -= lr * g_pred[k];
      for (std::size_t k = 0; k < g_enc.size(); ++k) res.encoder.params[k] -= lr * g_enc[k];

      res.step_loss.push_back(loss.loss);
      epoch_total += loss.loss;
    }
    res.epoch_loss.push_back(epoch_total / static_cast<double>(views.size()));
  }
  return res;
}

// ---- synthetic benchmark ----------------------------------------------------

std::vector<SiteShard> synthetic_sites(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n_sites == 0 || spec.samples_per_site < 2 || spec.dims == 0) throw ValueError("empty synthetic benchmark");
  const SeededRng rng(seed, "synthetic");
  SeededRng dir_rng = rng.fork("direction");
  std::vector<double> u(spec.dims);
  for (double& v : u) v = dir_rng.normal(0.0, 1.0);
  const double un = norm2(u);
  for (double& v : u) v /= un;

  std::vector<SiteShard> shards;
  for (std::size_t s = 0; s < spec.n_sites; ++s) {
    SeededRng site = rng.fork("site:" + std::to_string(s));
    std::vector<double> shift(spec.dims);
    for (double& v : shift) v = site.normal(0.0, spec.site_shift / std::sqrt(static_cast<double>(spec.dims)));
    const double sigma = spec.noise * (0.75 + 0.5 * site.uniform());

    SiteShard shard;
    shard.site_id = "site" + std::to_string(s + 1);
    shard.dataset.task = ml::Task::classification;
    shard.dataset.features = Matrix(spec.samples_per_site, spec.dims);
    for (std::size_t i = 0; i < spec.samples_per_site; ++i) {
      const double label = static_cast<double>(i % 2);
      const double side = label == 1.0 ? 0.5 : -0.5;
      for (std::size_t k = 0; k < spec.dims; ++k) {
        shard.dataset.features(i, k) = shift[k] + side * spec.class_separation * u[k] + site.normal(0.0, sigma);
      }
      shard.dataset.targets.push_back(label);
      shard.dataset.site_ids.push_back(shard.site_id);
    }
    shards.push_back(std::move(shard));
  }
  return shards;
}

}  // namespace cortexkit::fed
