#include "cortexkit/ml.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cortexkit/construct.hpp"
#include "cortexkit/errors.hpp"
#include "cortexkit/linalg.hpp"
#include "cortexkit/timeseries.hpp"

namespace cortexkit::ml {

Task parse_task(const std::string& name) {
  if (name == "classification") return Task::classification;
  if (name == "regression") return Task::regression;
  throw ConfigError("unknown task '" + name + "'");
}

std::string to_string(Task t) { return t == Task::classification ? "classification" : "regression"; }

Model parse_model(const std::string& name) {
  if (name == "svm") return Model::svm;
  if (name == "logistic") return Model::logistic;
  if (name == "knn") return Model::knn;
  if (name == "mlp") return Model::mlp;
  throw ConfigError("unknown model '" + name + "'");
}

std::string to_string(Model m) {
  switch (m) {
    case Model::svm: return "svm";
    case Model::logistic: return "logistic";
    case Model::knn: return "knn";
    case Model::mlp: return "mlp";
  }
  return "?";
}

std::size_t LabeledDataset::n_classes() const {
  if (task == Task::regression || targets.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(targets.begin(), targets.end())) + 1;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> idx) const {
  LabeledDataset out;
  out.task = task;
  out.features = nn::gather_rows(features, idx);
  out.targets = nn::gather(targets, idx);
  if (!site_ids.empty())
    for (std::size_t i : idx) out.site_ids.push_back(site_ids[i]);
  return out;
}

void validate(const LabeledDataset& ds) {
  if (ds.features.rows() != ds.targets.size()) {
    throw DimensionError(std::to_string(ds.features.rows()) + " feature rows but " + std::to_string(ds.targets.size()) +
                         " targets");
  }
  if (!ds.site_ids.empty() && ds.site_ids.size() != ds.targets.size()) throw DimensionError("site id count mismatch");
  if (!ds.features.all_finite()) throw ValueError("dataset features contain non-finite values");
  for (double t : ds.targets)
    if (!std::isfinite(t)) throw ValueError("dataset targets contain non-finite values");
  if (ds.task == Task::classification && !ds.targets.empty()) {
    std::vector<bool> present(ds.n_classes(), false);
    for (double t : ds.targets) {
      if (t < 0.0 || t != std::floor(t)) throw ValueError("class label " + std::to_string(t) + " is not a non-negative integer");
      present[static_cast<std::size_t>(t)] = true;
    }
    for (std::size_t c = 0; c < present.size(); ++c)
      if (!present[c]) throw ValueError("class labels are not contiguous: class " + std::to_string(c) + " is missing");
  }
}

Standardizer Standardizer::fit(const Matrix& x) {
  Standardizer s;
  const std::size_t n = x.rows();
  s.mean.assign(x.cols(), 0.0);
  s.scale.assign(x.cols(), 1.0);
  if (n == 0) return s;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < n; ++r) m += x(r, c);
    m /= static_cast<double>(n);
    double v = 0.0;
    for (std::size_t r = 0; r < n; ++r) v += (x(r, c) - m) * (x(r, c) - m);
    const double sd = std::sqrt(v / static_cast<double>(n));
    s.mean[c] = m;
    s.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::transform(const Matrix& x) const {
  if (x.cols() != mean.size()) throw DimensionError("standardizer fitted on a different width");
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
  return out;
}

Matrix Pca::transform(const Matrix& x) const {
  if (x.cols() != mean.size()) throw DimensionError("pca fitted on a different width");
  Matrix centered = x;
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) centered(r, c) -= mean[c];
  return matmul(centered, components);
}

Pca pca_fit(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows(), d = x.cols();
  if (k == 0 || k > std::min(n, d)) {
    throw DimensionError("pca needs 1 <= k <= min(samples, dims) = " + std::to_string(std::min(n, d)) + ", got " +
                         std::to_string(k));
  }
  if (n < 2) throw DimensionError("pca needs at least 2 samples");
  Pca p;
  p.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) p.mean[c] += x(r, c) / static_cast<double>(n);
  Matrix centered = x;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) centered(r, c) -= p.mean[c];

  const Svd s = svd(centered);
  double total = 0.0;
  for (double v : s.values) total += v * v;
  p.components = Matrix(d, k);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t pivot = 0;
    for (std::size_t c = 0; c < d; ++c)
      if (std::abs(s.v(c, j)) > std::abs(s.v(pivot, j))) pivot = c;
    const double sign = s.v(pivot, j) < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < d; ++c) p.components(c, j) = sign * s.v(c, j);
    const double var = s.values[j] * s.values[j];
    p.explained_variance.push_back(var / static_cast<double>(n - 1));
    p.explained_variance_ratio.push_back(total > 0.0 ? var / total : 0.0);
  }
  return p;
}

PcaResult pca_fit_transform(const LabeledDataset& ds, std::size_t k) {
  PcaResult r{ds, pca_fit(ds.features, k)};
  r.reduced.features = r.pca.transform(ds.features);
  return r;
}

Predictions knn_predict(const LabeledDataset& train, const Matrix& test, std::size_t k) {
  const std::size_t n = train.size();
  if (n == 0) throw ValueError("knn needs a non-empty training set");
  if (k == 0 || k > n) throw ValueError("knn k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));
  if (test.cols() != train.features.cols()) throw DimensionError("test width differs from training width");
  const bool classify = train.task == Task::classification;
  const std::size_t classes = train.n_classes();

  Predictions out;
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t q = 0; q < test.rows(); ++q) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < test.cols(); ++c) {
        const double diff = test(q, c) - train.features(i, c);
        s += diff * diff;
      }
      dist[i] = {s, i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    if (classify) {
      std::vector<std::size_t> votes(classes, 0);
      for (std::size_t j = 0; j < k; ++j) ++votes[static_cast<std::size_t>(train.targets[dist[j].second])];
      const auto best = std::max_element(votes.begin(), votes.end()) - votes.begin();
      out.labels.push_back(static_cast<double>(best));
      out.scores.push_back(classes > 1 ? static_cast<double>(votes[1]) / static_cast<double>(k) : 0.0);
    } else {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += train.targets[dist[j].second];
      out.labels.push_back(s / static_cast<double>(k));
    }
  }
  return out;
}

namespace {

std::vector<double> signed_labels(const LabeledDataset& ds) {
  if (ds.task != Task::classification) throw ValueError("linear classifiers need a classification dataset");
  bool has0 = false, has1 = false;
  std::vector<double> y(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double t = ds.targets[i];
    if (t == 0.0) has0 = true, y[i] = -1.0;
    else if (t == 1.0) has1 = true, y[i] = 1.0;
    else throw ValueError("linear classifiers need binary 0/1 labels, got " + std::to_string(t));
  }
  if (!has0 || !has1) throw ValueError("training data holds a single class");
  return y;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

double linear_decision(const nn::ModelState& m, std::span<const double> x) {
  const auto w = m.view("weight");
  if (x.size() != w.size()) throw DimensionError("input width differs from model width");
  return dot(w, x) + m.view("bias")[0];
}

Predictions linear_predict(const nn::ModelState& m, const Matrix& x) {
  Predictions p;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double s = linear_decision(m, x.row(r));
    p.scores.push_back(s);
    p.labels.push_back(s > 0.0 ? 1.0 : 0.0);
  }
  return p;
}

double svm_objective(const nn::ModelState& m, const LabeledDataset& ds, double c) {
  const auto y = signed_labels(ds);
  const double n = static_cast<double>(ds.size());
  const double lambda = 1.0 / (c * n);
  double hinge = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) hinge += std::max(0.0, 1.0 - y[i] * linear_decision(m, ds.features.row(i)));
  const auto w = m.view("weight");
  return 0.5 * lambda * dot(w, w) + hinge / n;
}

LinearFit linear_svm_train(const LabeledDataset& ds, double c, std::size_t epochs, SeededRng& rng, double eta0) {
  if (!(c > 0.0)) throw ValueError("SVM C must be positive");
  const auto y = signed_labels(ds);
  const std::size_t n = ds.size(), d = ds.features.cols();
  const double lambda = 1.0 / (c * static_cast<double>(n));

  std::vector<double> w(d, 0.0), wa(d, 0.0);
  double b = 0.0, ba = 0.0;
  double t = 1.0;
  LinearFit fit{nn::make_linear(d), {}};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const double eta = eta0 / (1.0 + eta0 * lambda * t);
      const auto x = ds.features.row(i);
      const double margin = y[i] * (dot(w, x) + b);
      const double shrink = 1.0 / (1.0 + eta * lambda);
      if (margin < 1.0) {
        for (std::size_t k = 0; k < d; ++k) w[k] = (w[k] + eta * y[i] * x[k]) * shrink;
        b += eta * y[i];
      } else {
        for (double& v : w) v *= shrink;
      }
      for (std::size_t k = 0; k < d; ++k) wa[k] += (w[k] - wa[k]) / t;
      ba += (b - ba) / t;
      t += 1.0;
    }
    std::copy(wa.begin(), wa.end(), fit.model.view("weight").begin());
    fit.model.view("bias")[0] = ba;
    fit.objective_trace.push_back(svm_objective(fit.model, ds, c));
  }
  return fit;
}

std::pair<double, std::vector<double>> logistic_loss_grad(std::span<const double> params, const LabeledDataset& ds,
                                                          double l2) {
  signed_labels(ds);
  const std::size_t n = ds.size(), d = ds.features.cols();
  if (params.size() != d + 1) throw DimensionError("logistic parameters must have width dims + 1");
  const auto w = params.subspan(0, d);
  const double b = params[d];
  double loss = 0.0;
  std::vector<double> grad(d + 1, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = ds.features.row(i);
    const double z = dot(w, x) + b;
    const double y = ds.targets[i];
    loss += (softplus(z) - y * z) * inv_n;
    const double r = (sigmoid(z) - y) * inv_n;
    for (std::size_t k = 0; k < d; ++k) grad[k] += r * x[k];
    grad[d] += r;
  }
  loss += 0.5 * l2 * dot(w, w);
  for (std::size_t k = 0; k < d; ++k) grad[k] += l2 * w[k];
  return {loss, grad};
}

LinearFit logistic_train(const LabeledDataset& ds, double l2, std::size_t iters) {
  if (!(l2 >= 0.0)) throw ValueError("l2 must be non-negative");
  signed_labels(ds);
  const std::size_t n = ds.size(), d = ds.features.cols();
  // The Hessian of the data term is bounded by X~ᵀX~ / (4n), whose largest
  // eigenvalue is at most its trace.
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = ds.features.row(i);
    trace += dot(x, x) + 1.0;
  }
  const double lipschitz = 0.25 * trace / static_cast<double>(n) + l2;
  const double step = 1.0 / lipschitz;

  LinearFit fit{nn::make_linear(d), {}};
  for (std::size_t it = 0; it < iters; ++it) {
    auto [loss, grad] = logistic_loss_grad(fit.model.params, ds, l2);
    for (std::size_t k = 0; k <= d; ++k) fit.model.params[k] -= step * grad[k];
    fit.objective_trace.push_back(logistic_loss_grad(fit.model.params, ds, l2).first);
  }
  return fit;
}

std::vector<Split> partition_kfold(std::size_t n, std::size_t k, SeededRng& rng) {
  if (k < 2 || k > n) throw ValueError("k-fold needs 2 <= K <= n, got K=" + std::to_string(k) + ", n=" + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> fold_of(n);
  const std::size_t base = n / k, extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t j = 0; j < size; ++j) fold_of[order[pos++]] = f;
  }
  std::vector<Split> splits(k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < k; ++f) (fold_of[i] == f ? splits[f].validation : splits[f].train).push_back(i);
  return splits;
}

std::vector<Split> partition_stratified(std::span<const double> labels, std::size_t k, SeededRng& rng) {
  const std::size_t n = labels.size();
  if (k < 2 || k > n) throw ValueError("k-fold needs 2 <= K <= n, got K=" + std::to_string(k) + ", n=" + std::to_string(n));
  std::vector<double> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  std::vector<std::size_t> dealt;
  for (double c : classes) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (labels[i] == c) members.push_back(i);
    rng.shuffle(std::span<std::size_t>(members));
    dealt.insert(dealt.end(), members.begin(), members.end());
  }
  std::vector<std::size_t> fold_of(n);
  for (std::size_t j = 0; j < n; ++j) fold_of[dealt[j]] = j % k;
  std::vector<Split> splits(k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < k; ++f) (fold_of[i] == f ? splits[f].validation : splits[f].train).push_back(i);
  return splits;
}

Split partition_random(std::size_t n, double percent, SeededRng& rng) {
  if (!(percent > 0.0 && percent <= 100.0)) throw ValueError("partition ratio must lie in (0, 100]");
  const std::size_t n_train = floor_count(static_cast<double>(n) * percent / 100.0);
  if (n_train == 0 || n_train >= n) {
    throw ValueError("partition ratio " + std::to_string(percent) + "% of " + std::to_string(n) +
                     " samples leaves an empty side");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

namespace {

void check_binary(std::span<const double> y) {
  for (double v : y)
    if (v != 0.0 && v != 1.0) throw ValueError("binary evaluation needs 0/1 labels, got " + std::to_string(v));
}

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

double auc(std::span<const double> y_true, std::span<const double> y_score) {
  if (y_true.size() != y_score.size()) throw DimensionError("label and score lengths differ");
  check_binary(y_true);
  const auto ranks = construct::midranks(y_score);
  double n1 = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] == 1.0) n1 += 1.0, rank_sum += ranks[i];
  const double n0 = static_cast<double>(y_true.size()) - n1;
  if (n1 == 0.0 || n0 == 0.0) throw UndefinedError("AUC needs both classes in y_true");
  return (rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

std::vector<std::pair<double, double>> roc_curve(std::span<const double> y_true, std::span<const double> y_score) {
  check_binary(y_true);
  std::vector<std::size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y_score[a] > y_score[b]; });
  double pos = 0.0;
  for (double v : y_true) pos += v;
  const double neg = static_cast<double>(y_true.size()) - pos;
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  double tp = 0.0, fp = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    (y_true[order[j]] == 1.0 ? tp : fp) += 1.0;
    if (j + 1 == order.size() || y_score[order[j + 1]] != y_score[order[j]]) pts.emplace_back(ratio(fp, neg), ratio(tp, pos));
  }
  if (pts.back() != std::pair<double, double>{1.0, 1.0}) pts.emplace_back(1.0, 1.0);
  return pts;
}

Confusion confusion_from(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw DimensionError("label and prediction lengths differ");
  check_binary(y_true);
  check_binary(y_pred);
  Confusion c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1.0) (y_pred[i] == 1.0 ? c.tp : c.fn)++;
    else (y_pred[i] == 1.0 ? c.fp : c.tn)++;
  }
  return c;
}

double concordance(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double vx = 0.0, vy = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    vx += (x[i] - mx) * (x[i] - mx) / n;
    vy += (y[i] - my) * (y[i] - my) / n;
    cov += (x[i] - mx) * (y[i] - my) / n;
  }
  const double den = vx + vy + (mx - my) * (mx - my);
  if (!(den > 0.0)) return x.size() > 0 && mx == my ? 1.0 : 0.0;
  return 2.0 * cov / den;
}

EvalReport evaluate(std::span<const double> y_true, std::span<const double> y_score, std::span<const double> y_pred,
                    Task task) {
  if (y_true.size() != y_pred.size()) throw DimensionError("label and prediction lengths differ");
  if (y_true.empty()) throw ValueError("nothing to evaluate");
  EvalReport r;
  r.task = task;
  r.n = y_true.size();
  if (task == Task::regression) {
    for (std::size_t i = 0; i < r.n; ++i) {
      const double e = y_pred[i] - y_true[i];
      r.mae += std::abs(e) / static_cast<double>(r.n);
      r.mse += e * e / static_cast<double>(r.n);
    }
    r.ccc = concordance(y_true, y_pred);
    return r;
  }
  r.auc = auc(y_true, y_score);
  r.roc_points = roc_curve(y_true, y_score);
  r.confusion = confusion_from(y_true, y_pred);
  const auto& c = r.confusion;
  const double tp = static_cast<double>(c.tp), fn = static_cast<double>(c.fn);
  const double tn = static_cast<double>(c.tn), fp = static_cast<double>(c.fp);
  r.accuracy = (tp + tn) / static_cast<double>(r.n);
  r.sensitivity = ratio(tp, tp + fn);
  r.specificity = ratio(tn, tn + fp);
  r.precision = ratio(tp, tp + fp);
  r.balanced_accuracy = 0.5 * (r.sensitivity + r.specificity);
  r.f1 = ratio(2.0 * r.precision * r.sensitivity, r.precision + r.sensitivity);
  return r;
}

std::vector<std::string> metric_names(Task task) {
  if (task == Task::regression) return {"mae", "mse", "ccc"};
  return {"auc", "accuracy", "balanced_accuracy", "f1", "sensitivity", "specificity", "precision"};
}

double metric_value(const EvalReport& r, const std::string& name) {
  if (name == "auc") return r.auc;
  if (name == "accuracy") return r.accuracy;
  if (name == "balanced_accuracy") return r.balanced_accuracy;
  if (name == "f1") return r.f1;
  if (name == "sensitivity") return r.sensitivity;
  if (name == "specificity") return r.specificity;
  if (name == "precision") return r.precision;
  if (name == "mae") return r.mae;
  if (name == "mse") return r.mse;
  if (name == "ccc") return r.ccc;
  throw ConfigError("unknown metric '" + name + "'");
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v / n;
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean) / n;
  s.std = std::sqrt(var);
  return s;
}

std::string format_percent(const MetricSummary& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f±%.2f", s.mean * 100.0, s.std * 100.0);
  return buf;
}

CvResult cross_validate(const LabeledDataset& ds, const MlSpec& spec, const SeededRng& rng, const SeededRng& init) {
  validate(ds);
  const bool classify = ds.task == Task::classification;
  if (!classify && spec.model != Model::knn) throw ConfigError(to_string(spec.model) + " supports classification only");

  SeededRng fold_rng = rng.fork("folds");
  std::vector<Split> splits;
  if (spec.train_percent) splits.push_back(partition_random(ds.size(), *spec.train_percent, fold_rng));
  else if (classify) splits = partition_stratified(ds.targets, spec.folds, fold_rng);
  else splits = partition_kfold(ds.size(), spec.folds, fold_rng);

  CvResult result;
  for (std::size_t f = 0; f < splits.size(); ++f) {
    LabeledDataset train = ds.subset(splits[f].train);
    LabeledDataset val = ds.subset(splits[f].validation);
    if (spec.standardize) {
      const auto s = Standardizer::fit(train.features);
      train.features = s.transform(train.features);
      val.features = s.transform(val.features);
    }
    if (spec.pca_dims) {
      const auto p = pca_fit(train.features, *spec.pca_dims);
      train.features = p.transform(train.features);
      val.features = p.transform(val.features);
    }
    const std::string tag = "fold:" + std::to_string(f);
    SeededRng train_rng = rng.fork(tag);
    Predictions pred;
    switch (spec.model) {
      case Model::svm: pred = linear_predict(linear_svm_train(train, spec.svm_c, spec.epochs, train_rng).model, val.features); break;
      case Model::logistic: pred = linear_predict(logistic_train(train, spec.l2, spec.epochs).model, val.features); break;
      case Model::knn: pred = knn_predict(train, val.features, std::min(spec.knn_k, train.size())); break;
      case Model::mlp: {
        nn::ModelState m = nn::make_mlp(train.features.cols(), spec.hidden, std::max<std::size_t>(2, ds.n_classes()));
        SeededRng init_rng = init.fork(tag);
        nn::init_mlp(m, init_rng);
        const auto step = nn::sgd_step(spec.lr);
        for (std::size_t e = 0; e < spec.epochs; ++e) {
          SeededRng epoch_rng = train_rng.fork("epoch:" + std::to_string(e));
          nn::run_epoch(m, train.features, train.targets, spec.batch, epoch_rng, step);
        }
        const Matrix proba = nn::mlp_predict_proba(m, val.features);
        for (std::size_t r = 0; r < proba.rows(); ++r) {
          const auto row = proba.row(r);
          pred.labels.push_back(static_cast<double>(std::max_element(row.begin(), row.end()) - row.begin()));
          pred.scores.push_back(row[1]);
        }
        result.fold_models.push_back(std::move(m));
        break;
      }
    }
    if (!classify) pred.scores = pred.labels;
    result.folds.push_back(evaluate(val.targets, pred.scores, pred.labels, ds.task));
    for (std::size_t j = 0; j < val.size(); ++j) {
      result.oof_index.push_back(splits[f].validation[j]);
      result.oof_scores.push_back(pred.scores[j]);
      result.oof_labels.push_back(pred.labels[j]);
    }
  }
  std::vector<double> truth;
  for (std::size_t i : result.oof_index) truth.push_back(ds.targets[i]);
  result.pooled = evaluate(truth, result.oof_scores, result.oof_labels, ds.task);
  for (const auto& name : metric_names(ds.task)) {
    std::vector<double> values;
    for (const auto& r : result.folds) values.push_back(metric_value(r, name));
    result.summary[name] = summarize(values);
  }
  return result;
}

}  // namespace cortexkit::ml
