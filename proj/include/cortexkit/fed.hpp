#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cortexkit/ml.hpp"
#include "cortexkit/model.hpp"
#include "cortexkit/timeseries.hpp"

namespace cortexkit::fed {

enum class Strategy { fedavg, fedprox, moon, lgfedavg, pfedme, single, mix };

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy s);

struct SiteShard {
  std::string site_id;
  ml::LabeledDataset dataset;
  std::size_t local_epochs = 2;
  double lr = 0.1;
  std::size_t batch = 16;
};

struct FedConfig {
  Strategy strategy = Strategy::fedavg;
  std::size_t rounds = 20;
  double mu = 1.0;             // FedProx / pFedMe proximal weight
  double moon_weight = 1.0;
  double moon_temp = 0.5;
  std::uint64_t seed = 0;
  std::size_t hidden = 16;
  std::size_t folds = 5;
  std::size_t pfedme_inner_iters = 5;
  double pfedme_inner_lr = 0.05;
  double pfedme_beta = 1.0;  // server mixing: global <- (1-beta) global + beta mean
};

// Throws ConfigError on invalid settings.
void validate(const FedConfig& cfg);

// ---- losses -------------------------------------------------------------

// Phi(a, b) = -a.b / (|a||b|) and its gradient with respect to b.
double neg_cosine(std::span<const double> a, std::span<const double> b);
std::vector<double> neg_cosine_grad_b(std::span<const double> a, std::span<const double> b);

struct SimSiamLoss {
  double loss = 0.0;
  std::vector<double> grad_z1, grad_z2;  // identically zero: z enters only through the stop-gradient
  std::vector<double> grad_p1, grad_p2;
};

// L = Phi(sg(z1), p2) + Phi(sg(z2), p1). Throws ValueError on a zero vector.
SimSiamLoss simsiam_loss(std::span<const double> z1, std::span<const double> z2, std::span<const double> p1,
                         std::span<const double> p2);

// Cross-entropy plus (mu/2)|w - w_global|^2.
nn::ForwardBackward fedprox_loss_grad(const nn::ModelState& local, const nn::ModelState& global, const Matrix& x,
                                      std::span<const double> y, double mu);

// Per-sample contrastive term -log(e^{s_g/t} / (e^{s_g/t} + e^{s_p/t})),
// s_g = cos(z, z_global), s_p = cos(z, z_prev), averaged over the batch and
// scaled by `weight`. Returns the term and dL/dz.
std::pair<double, Matrix> moon_term(const Matrix& z, const Matrix& z_global, const Matrix& z_prev, double weight,
                                    double temp);

nn::ForwardBackward moon_loss_grad(const nn::ModelState& local, const nn::ModelState& global,
                                   const nn::ModelState& previous, const Matrix& x, std::span<const double> y,
                                   double weight, double temp);

// ---- pFedMe -------------------------------------------------------------

using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

// Gradient descent on f(theta) + (mu/2)|theta - w|^2 from theta0. Throws
// ValueError unless mu > 0.
std::vector<double> prox_solve(const GradientFn& grad_f, std::span<const double> w, std::span<const double> theta0,
                               double mu, double lr, std::size_t iters);

struct PfedmeStep {
  std::vector<double> theta;  // personalized parameters
  std::vector<double> w;      // updated local copy of the global model
};

// One pFedMe local step: theta from prox_solve, then w <- w - eta mu (w - theta).
PfedmeStep pfedme_local(const GradientFn& grad_f, std::span<const double> w, std::span<const double> theta0, double mu,
                        double eta, double inner_lr, std::size_t inner_iters);

// ---- local update and aggregation ----------------------------------------

struct LocalContext {
  Strategy strategy = Strategy::fedavg;
  const nn::ModelState* global = nullptr;
  const nn::ModelState* previous = nullptr;  // MOON: this site's model from the last round
  double mu = 0.0;
  double moon_weight = 0.0;
  double moon_temp = 0.5;
  std::size_t inner_iters = 5;
  double inner_lr = 0.05;
  std::size_t first_epoch = 0;  // global epoch index of this round's first local epoch
};

struct LocalResult {
  nn::ModelState state;
  nn::ModelState personalized;  // pFedMe only
  double loss = 0.0;            // mean minibatch loss over the local epochs
  std::uint64_t bytes_out = 0;
};

// Runs shard.local_epochs epochs starting from `start`; epoch e shuffles with
// rng.fork("epoch:<first_epoch + e>"). Throws DimensionError when the shard
// width does not match the model.
LocalResult local_update(const SiteShard& shard, const Matrix& x, std::span<const double> y, nn::ModelState start,
                         const LocalContext& ctx, const SeededRng& rng);

// Bytes one site sends per round under a strategy.
std::uint64_t upload_bytes(Strategy s, const nn::ModelState& m);

struct SiteUpdate {
  std::string site_id;
  std::size_t n_samples = 0;
  nn::ModelState state;
};

// Sample-size weighted mean, summed in site_id order. LGFedAvg averages only
// the head spans; pFedMe mixes with `beta`. Throws ValueError on no sites.
nn::ModelState aggregate(Strategy s, const std::vector<SiteUpdate>& sites, const nn::ModelState& global,
                         double beta = 1.0);

// ---- orchestration --------------------------------------------------------

struct TraceRow {
  std::size_t round = 0;  // 1-based
  std::string site_id;
  double loss = 0.0;              // training loss, averaged over folds
  std::uint64_t bytes = 0;        // sent this round, summed over folds
  std::uint64_t cumulative_bytes = 0;
};

struct FedTrace {
  std::vector<TraceRow> rows;                          // rounds x sites, round-major
  std::vector<std::vector<std::vector<double>>> global_params;  // [fold][round]
  std::uint64_t total_bytes() const;
};

struct FedResult {
  FedTrace trace;
  std::map<std::string, ml::EvalReport> site_reports;  // pooled over each site's folds
  ml::EvalReport average;  // all sites' out-of-fold predictions concatenated
  // Final evaluated model per [fold][site index].
  std::vector<std::vector<nn::ModelState>> final_models;
};

// Random streams: root = SeededRng(seed, "pipeline"); initial weights for fold
// f come from root.fork("init").fork("fold:<f>") and are shared by all sites;
// site s uses root.fork("site:<id>") for its folds and epoch shuffles, exactly
// as ml::cross_validate does; Mix uses root.fork("site:mix").
FedResult run_federation(const FedConfig& cfg, const std::vector<SiteShard>& shards);

// ---- contrastive pretraining ----------------------------------------------

struct PretrainResult {
  nn::ModelState encoder;      // mlp1 whose head is left at zero
  nn::ModelState predictor;    // mlp1 used as z -> p (head output width = hidden)
  std::vector<double> epoch_loss;
  std::vector<double> step_loss;
};

// Upper-triangle Pearson features of a series.
std::vector<double> connectivity_features(const TimeSeries& ts);

// Two views per subject from the pretraining split; SGD on the SimSiam loss.
// Throws ValueError on an empty corpus.
PretrainResult pretrain(const std::vector<TimeSeries>& corpus, std::size_t epochs, std::uint64_t seed,
                        std::size_t hidden = 16, double lr = 0.05);

// ---- synthetic benchmark ----------------------------------------------------

struct SyntheticSpec {
  std::size_t n_sites = 3;
  std::size_t samples_per_site = 40;
  std::size_t dims = 10;
  double class_separation = 1.0;  // distance between class means
  double site_shift = 1.5;        // scale of per-site mean offsets
  double noise = 1.0;
};

// Two Gaussian classes sharing a direction across sites, with a per-site mean
// shift and per-site noise scale.
std::vector<SiteShard> synthetic_sites(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace cortexkit::fed
