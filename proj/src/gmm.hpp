#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace agenet {

// Weights, means, and full covariances of one Gaussian mixture.
struct GmmParams {
  std::vector<double> weights;              // k positive reals summing to 1
  std::vector<Eigen::VectorXd> means;       // k vectors of dimension d
  std::vector<Eigen::MatrixXd> covariances; // k symmetric positive-definite d x d

  int components() const { return static_cast<int>(weights.size()); }
  Eigen::Index dim() const { return means.empty() ? 0 : means.front().size(); }

  // Throws std::invalid_argument on any invariant violation: weight sum off
  // by more than 1e-12, non-positive weight, asymmetry beyond 1e-10, or a
  // covariance that is not positive definite.
  void validate() const;
};

struct EmConfig {
  int max_iters = 200;
  double tol = 1e-6;      // relative log-likelihood change, |dLL| / (1 + |LL|)
  double reg_eps = 1e-6;  // ridge added to covariance diagonals every M-step
  int n_restarts = 3;
  std::uint64_t seed = 0;

  void validate() const;  // all fields within stated domains
};

// Immutable evaluator caching per-component Cholesky factors and log
// normalizers. Building one costs k Cholesky factorizations of d x d.
class GmmDensity {
 public:
  explicit GmmDensity(const GmmParams& params);

  Eigen::Index dim() const { return dim_; }

  // ln sum_j w_j N_j(x), via log-sum-exp over components.
  double log_density(const Eigen::VectorXd& x) const;

  // Batched version; rows of `points` are evaluation points.
  Eigen::VectorXd log_densities(const Eigen::MatrixXd& points) const;

  // n x k matrix of ln w_j + ln N_j(x_i); the E-step and log_densities both
  // derive from this.
  Eigen::MatrixXd weighted_component_log_densities(const Eigen::MatrixXd& points) const;

 private:
  struct Component {
    Eigen::VectorXd mean;
    Eigen::MatrixXd chol_lower;  // L with L L^T = covariance
    double log_norm;             // -0.5*(d ln 2pi + ln det cov)
    double log_weight;
  };
  std::vector<Component> comps_;
  Eigen::Index dim_;
};

// ln of the mixture density at x. Throws on dimension mismatch.
double log_density(const GmmParams& gmm, const Eigen::VectorXd& x);

struct EmResult {
  GmmParams params;
  double final_log_likelihood = 0.0;
  bool converged = false;  // false: the winning restart hit max_iters
  // Per-restart total log-likelihood, one entry per E-step. Monotone
  // non-decreasing up to 1e-8 slack by the EM guarantee.
  std::vector<std::vector<double>> restart_histories;
  int best_restart = 0;

  const std::vector<double>& ll_history() const { return restart_histories[best_restart]; }
};

// Fits a k-component full-covariance mixture by EM. Rows of `samples` are
// observations. Initialization is k-means++ seeding followed by one
// hard-assignment pass; `config.n_restarts` independent restarts are run and
// the highest final log-likelihood wins (earliest restart on ties). The
// biased 1/N covariance estimator is used, with reg_eps added to the
// diagonal every M-step.
//
// Throws std::invalid_argument when samples.rows() < k or config is invalid.
// Non-convergence within max_iters is reported through EmResult::converged,
// not an error.
EmResult fit_em(const Eigen::MatrixXd& samples, int k, const EmConfig& config);

}  // namespace agenet
