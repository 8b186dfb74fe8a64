#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cortexkit/graph.hpp"
#include "cortexkit/timeseries.hpp"

namespace cortexkit::construct {

enum class Method { pearson, mutual_info, partial_corr, spearman, hofc, sparse_rep, lowrank_rep };

Method parse_method(const std::string& name);
std::string to_string(Method m);

struct SparsifySpec {
  double top_percent = 30.0;  // K
  bool binarize = false;
  bool by_magnitude = false;  // rank |a_ij| instead of the signed value
};

struct ConstructSpec {
  Method method = Method::pearson;
  double lambda = 0.1;                // SR / LR regularization
  std::size_t n_bins = 0;             // mutual information; 0 selects ceil(sqrt(T))
  std::optional<double> ridge;        // partial correlation; unset selects 1e-6 * trace(S) / N
  double solver_tol = 1e-6;
  std::size_t solver_max_iters = 5000;
  std::optional<SparsifySpec> sparsify;
};

// Trace of a proximal-gradient solve. The solve stops once the relative
// objective change is below tol and 2L|W+ - W| is below tol * max(1, max|XᵀX|).
// `converged` false means max_iters was hit first; `warning` then carries a
// ConvergenceWarning message.
struct SolverInfo {
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective at W_0 = 0, then after each step
  std::string warning;
};

struct Representation {
  BrainGraph graph;
  Matrix coefficients;  // W before symmetrization
  SolverInfo info;
};

struct Construction {
  BrainGraph graph;
  std::optional<SolverInfo> solver;
};

BrainGraph pearson(const TimeSeries& ts);
BrainGraph mutual_info(const TimeSeries& ts, std::size_t n_bins);
BrainGraph partial_corr(const TimeSeries& ts, std::optional<double> ridge = std::nullopt);
BrainGraph spearman(const TimeSeries& ts);
BrainGraph hofc(const TimeSeries& ts);
Representation sparse_rep(const TimeSeries& ts, double lambda, double tol = 1e-6, std::size_t max_iters = 5000);
Representation lowrank_rep(const TimeSeries& ts, double lambda, double tol = 1e-6, std::size_t max_iters = 5000);

// Keeps the ceil(K% of N(N-1)/2) largest nonzero upper-triangle entries,
// ties broken by (row, col); everything else becomes 0.
BrainGraph sparsify(const BrainGraph& g, double top_percent, bool binarize, bool by_magnitude = false);

Construction build(const TimeSeries& ts, const ConstructSpec& spec);

// Building blocks shared with tests and the solvers.
Matrix correlation_matrix(const Matrix& columns);  // unit diagonal kept
std::vector<double> midranks(std::span<const double> x);
double sr_objective(const Matrix& x, const Matrix& w, double lambda);
double lr_objective(const Matrix& x, const Matrix& w, double lambda);
Matrix soft_threshold(const Matrix& m, double tau);
Matrix singular_value_threshold(const Matrix& m, double tau);

}  // namespace cortexkit::construct
