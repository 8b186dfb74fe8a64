#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cortexkit/matrix.hpp"
#include "cortexkit/model.hpp"
#include "cortexkit/rng.hpp"

namespace cortexkit::ml {

enum class Task { classification, regression };

Task parse_task(const std::string& name);
std::string to_string(Task t);

struct LabeledDataset {
  Matrix features;               // samples x dims
  std::vector<double> targets;   // class index or regression value
  Task task = Task::classification;
  std::vector<std::string> site_ids;  // empty, or one per sample

  std::size_t size() const noexcept { return targets.size(); }
  // Number of classes (max label + 1); 0 for regression.
  std::size_t n_classes() const;
  LabeledDataset subset(std::span<const std::size_t> idx) const;
};

// Throws DimensionError on shape mismatch and ValueError on non-finite values
// or class labels that are not contiguous integers from 0.
void validate(const LabeledDataset& ds);

// Column-wise z-scoring fitted on one matrix and applied to others. Constant
// columns are centered but not scaled.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  Matrix transform(const Matrix& x) const;
};

struct Pca {
  std::vector<double> mean;
  Matrix components;  // dims x k, orthonormal columns
  std::vector<double> explained_variance;        // per component, descending
  std::vector<double> explained_variance_ratio;  // share of total variance

  Matrix transform(const Matrix& x) const;
};

// Throws DimensionError unless 1 <= k <= min(samples, dims).
Pca pca_fit(const Matrix& x, std::size_t k);

struct PcaResult {
  LabeledDataset reduced;
  Pca pca;
};
PcaResult pca_fit_transform(const LabeledDataset& ds, std::size_t k);

struct Predictions {
  std::vector<double> labels;  // predicted class (or value for regression)
  std::vector<double> scores;  // positive-class score; empty for regression
};

// Euclidean k nearest neighbours; distance ties go to the lower training
// index, vote ties to the smaller class. Throws ValueError on an empty
// training set or k outside [1, train size].
Predictions knn_predict(const LabeledDataset& train, const Matrix& test, std::size_t k);

struct LinearFit {
  nn::ModelState model;                 // arch linear
  std::vector<double> objective_trace;  // after each epoch
};

double linear_decision(const nn::ModelState& m, std::span<const double> x);
Predictions linear_predict(const nn::ModelState& m, const Matrix& x);

// Primal objective lambda/2 |w|^2 + mean hinge, lambda = 1/(C n), labels
// {0,1} mapped to {-1,+1}.
double svm_objective(const nn::ModelState& m, const LabeledDataset& ds, double c);

// Averaged SGD with an implicit L2 step and step size eta0 / (1 + eta0 lambda t).
// Throws ValueError unless the labels are binary with both classes present.
LinearFit linear_svm_train(const LabeledDataset& ds, double c, std::size_t epochs, SeededRng& rng,
                           double eta0 = 0.5);

// Mean cross-entropy plus l2/2 |w|^2 (bias unpenalized) and its gradient with
// respect to [w, b].
std::pair<double, std::vector<double>> logistic_loss_grad(std::span<const double> params, const LabeledDataset& ds,
                                                          double l2);

// Full-batch gradient descent with step 1/L for `iters` iterations.
LinearFit logistic_train(const LabeledDataset& ds, double l2, std::size_t iters);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// K folds over a shuffled index order; fold sizes differ by at most one.
// Throws ValueError unless 2 <= K <= n.
std::vector<Split> partition_kfold(std::size_t n, std::size_t k, SeededRng& rng);

// As partition_kfold, but each class is shuffled separately and dealt to the
// folds in turn so class proportions are kept.
std::vector<Split> partition_stratified(std::span<const double> labels, std::size_t k, SeededRng& rng);

// floor(n R / 100) training samples, the rest validation. Throws ValueError
// when either side would be empty.
Split partition_random(std::size_t n, double percent, SeededRng& rng);

struct Confusion {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  std::size_t total() const noexcept { return tp + fn + tn + fp; }
};

struct EvalReport {
  Task task = Task::classification;
  std::size_t n = 0;
  // classification
  double auc = 0.0;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double f1 = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  Confusion confusion;
  std::vector<std::pair<double, double>> roc_points;  // (fpr, tpr) from (0,0) to (1,1)
  // regression
  double mae = 0.0;
  double mse = 0.0;
  double ccc = 0.0;
};

// Mann-Whitney statistic with mid-rank ties. Throws UndefinedError when
// y_true holds a single class.
double auc(std::span<const double> y_true, std::span<const double> y_score);
std::vector<std::pair<double, double>> roc_curve(std::span<const double> y_true, std::span<const double> y_score);
Confusion confusion_from(std::span<const double> y_true, std::span<const double> y_pred);
double concordance(std::span<const double> x, std::span<const double> y);

// Binary classification (labels 0/1) or regression. Ratios with a zero
// denominator are reported as 0.
EvalReport evaluate(std::span<const double> y_true, std::span<const double> y_score, std::span<const double> y_pred,
                    Task task);

// Names of the scalar metrics for a task, in report order.
std::vector<std::string> metric_names(Task task);
double metric_value(const EvalReport& r, const std::string& name);

enum class Model { svm, logistic, knn, mlp };
Model parse_model(const std::string& name);
std::string to_string(Model m);

struct MlSpec {
  Model model = Model::svm;
  std::size_t folds = 5;
  std::optional<double> train_percent;  // random split instead of K folds
  std::optional<std::size_t> pca_dims;  // fitted inside each training fold
  bool standardize = true;
  double svm_c = 1.0;
  std::size_t epochs = 50;  // SVM / MLP epochs, logistic iterations
  double l2 = 1e-3;
  std::size_t knn_k = 5;
  std::size_t hidden = 16;  // MLP
  double lr = 0.1;          // MLP
  std::size_t batch = 16;   // MLP
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population std over folds
};

struct CvResult {
  std::vector<EvalReport> folds;
  std::map<std::string, MetricSummary> summary;
  EvalReport pooled;  // over all out-of-fold predictions
  std::vector<std::size_t> oof_index;  // sample behind each pooled prediction
  std::vector<double> oof_scores, oof_labels;
  std::vector<nn::ModelState> fold_models;  // MLP only
};

// Random streams: rng.fork("folds") partitions the data; fold f trains with
// rng.fork("fold:<f>"), MLP epoch e shuffles with
// rng.fork("fold:<f>").fork("epoch:<e>"), and MLP initial weights come from
// init.fork("fold:<f>").
CvResult cross_validate(const LabeledDataset& ds, const MlSpec& spec, const SeededRng& rng, const SeededRng& init);

// Mean and population std of `values`.
MetricSummary summarize(std::span<const double> values);

// Formats "mean±std" in percent with two decimals, e.g. "79.00±8.60".
std::string format_percent(const MetricSummary& s);

}  // namespace cortexkit::ml
