#include "gmm.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rng.hpp"

namespace agenet {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2*pi)

double log_sum_exp_row(const Eigen::RowVectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;  // all -inf stays -inf
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

void GmmParams::validate() const {
  if (weights.empty()) throw std::invalid_argument("GmmParams: no components");
  if (means.size() != weights.size() || covariances.size() != weights.size())
    throw std::invalid_argument("GmmParams: component count mismatch");
  const Eigen::Index d = dim();
  double sum = 0.0;
  for (int j = 0; j < components(); ++j) {
    if (!(weights[j] > 0.0))
      throw std::invalid_argument("GmmParams: weight " + std::to_string(j) + " not positive");
    sum += weights[j];
    if (means[j].size() != d || covariances[j].rows() != d || covariances[j].cols() != d)
      throw std::invalid_argument("GmmParams: dimension mismatch in component " + std::to_string(j));
    if ((covariances[j] - covariances[j].transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("GmmParams: covariance " + std::to_string(j) + " not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(covariances[j]);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("GmmParams: covariance " + std::to_string(j) +
                                  " not positive definite");
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("GmmParams: weights sum to " + std::to_string(sum));
}

void EmConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("EmConfig: max_iters must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("EmConfig: tol must be positive");
  if (!(reg_eps > 0.0)) throw std::invalid_argument("EmConfig: reg_eps must be positive");
  if (n_restarts < 1) throw std::invalid_argument("EmConfig: n_restarts must be positive");
}

GmmDensity::GmmDensity(const GmmParams& params) : dim_(params.dim()) {
  comps_.reserve(params.weights.size());
  for (int j = 0; j < params.components(); ++j) {
    Eigen::LLT<Eigen::MatrixXd> llt(params.covariances[j]);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("GmmDensity: covariance " + std::to_string(j) +
                                  " not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    const double log_det = 2.0 * L.diagonal().array().log().sum();
    comps_.push_back({params.means[j], std::move(L),
                      -0.5 * (static_cast<double>(dim_) * kLog2Pi + log_det),
                      std::log(params.weights[j])});
  }
}

Eigen::MatrixXd GmmDensity::weighted_component_log_densities(const Eigen::MatrixXd& points) const {
  if (points.cols() != dim_)
    throw std::invalid_argument("GmmDensity: point dimension " + std::to_string(points.cols()) +
                                " does not match mixture dimension " + std::to_string(dim_));
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(comps_.size()));
  for (std::size_t j = 0; j < comps_.size(); ++j) {
    const auto& c = comps_[j];
    // z = L^{-1} (x - mu); quadratic form = |z|^2
    Eigen::MatrixXd centered = (points.rowwise() - c.mean.transpose()).transpose();
    c.chol_lower.triangularView<Eigen::Lower>().solveInPlace(centered);
    out.col(static_cast<Eigen::Index>(j)) =
        (-0.5 * centered.colwise().squaredNorm().transpose().array() + c.log_norm + c.log_weight)
            .matrix();
  }
  return out;
}

double GmmDensity::log_density(const Eigen::VectorXd& x) const {
  return log_densities(x.transpose())(0);
}

Eigen::VectorXd GmmDensity::log_densities(const Eigen::MatrixXd& points) const {
  const Eigen::MatrixXd wl = weighted_component_log_densities(points);
  Eigen::VectorXd out(wl.rows());
  for (Eigen::Index i = 0; i < wl.rows(); ++i) out(i) = log_sum_exp_row(wl.row(i));
  return out;
}

double log_density(const GmmParams& gmm, const Eigen::VectorXd& x) {
  if (x.size() != gmm.dim())
    throw std::invalid_argument("log_density: input dimension " + std::to_string(x.size()) +
                                " does not match mixture dimension " + std::to_string(gmm.dim()));
  return GmmDensity(gmm).log_density(x);
}

namespace {

// k-means++ seeding: first center uniform, the rest proportional to squared
// distance from the nearest chosen center.
std::vector<Eigen::Index> kmeanspp_centers(const Eigen::MatrixXd& samples, int k, Rng& rng) {
  const Eigen::Index n = samples.rows();
  std::vector<Eigen::Index> centers;
  centers.reserve(k);
  centers.push_back(rng.uniform_int(0, static_cast<int>(n) - 1));
  Eigen::VectorXd min_dist2 =
      (samples.rowwise() - samples.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const double total = min_dist2.sum();
    Eigen::Index next;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      next = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        r -= min_dist2(i);
        if (r < 0.0) { next = i; break; }
      }
    } else {
      next = rng.uniform_int(0, static_cast<int>(n) - 1);  // all points coincide
    }
    centers.push_back(next);
    min_dist2 =
        min_dist2.cwiseMin((samples.rowwise() - samples.row(next)).rowwise().squaredNorm());
  }
  return centers;
}

GmmParams m_step(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& resp, double reg_eps,
                 const Eigen::MatrixXd& fallback_cov) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  const Eigen::Index k = resp.cols();
  GmmParams p;
  p.weights.resize(k);
  p.means.resize(k);
  p.covariances.resize(k);
  const Eigen::VectorXd counts = resp.colwise().sum();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double nj = counts(j);
    if (nj <= n * 1e-300) {
      // collapsed component: park it on the global statistics with a floor
      // weight so the invariants keep holding
      p.weights[j] = 1.0 / static_cast<double>(n);
      p.means[j] = samples.colwise().mean();
      p.covariances[j] = fallback_cov;
      p.covariances[j].diagonal().array() += reg_eps;
      continue;
    }
    p.weights[j] = nj / static_cast<double>(n);
    p.means[j] = (samples.transpose() * resp.col(j)) / nj;
    Eigen::MatrixXd centered = samples.rowwise() - p.means[j].transpose();
    Eigen::MatrixXd cov =
        (centered.transpose() * resp.col(j).asDiagonal() * centered) / nj;
    cov = 0.5 * (cov + cov.transpose());  // symmetrize away rounding skew
    cov.diagonal().array() += reg_eps;
    p.covariances[j] = std::move(cov);
  }
  // renormalize in case a collapsed component got a floor weight
  double ws = 0.0;
  for (double w : p.weights) ws += w;
  for (double& w : p.weights) w /= ws;
  return p;
}

struct EmRun {
  GmmParams params;
  std::vector<double> history;
  bool converged = false;
};

EmRun run_em_once(const Eigen::MatrixXd& samples, int k, const EmConfig& config,
                  std::uint64_t seed, const Eigen::MatrixXd& fallback_cov) {
  const Eigen::Index n = samples.rows();
  Rng rng(seed);

  // init: k-means++ centers, one hard-assignment pass, closed-form M-step
  const auto centers = kmeanspp_centers(samples, k, rng);
  Eigen::MatrixXd resp = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
      const double dist = (samples.row(i) - samples.row(centers[j])).squaredNorm();
      if (dist < best_d) { best_d = dist; best = j; }
    }
    resp(i, best) = 1.0;
  }

  EmRun run;
  run.params = m_step(samples, resp, config.reg_eps, fallback_cov);
  double ll_prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it <= config.max_iters; ++it) {
    const GmmDensity density(run.params);
    const Eigen::MatrixXd wl = density.weighted_component_log_densities(samples);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double row_lse = log_sum_exp_row(wl.row(i));
      ll += row_lse;
      resp.row(i) = (wl.row(i).array() - row_lse).exp();
    }
    run.history.push_back(ll);
    if (it > 0 && std::abs(ll - ll_prev) / (1.0 + std::abs(ll)) < config.tol) {
      run.converged = true;
      break;
    }
    if (it == config.max_iters) break;
    ll_prev = ll;
    run.params = m_step(samples, resp, config.reg_eps, fallback_cov);
  }
  return run;
}

}  // namespace

EmResult fit_em(const Eigen::MatrixXd& samples, int k, const EmConfig& config) {
  config.validate();
  if (k < 1) throw std::invalid_argument("fit_em: k must be positive");
  if (samples.rows() < k)
    throw std::invalid_argument("fit_em: " + std::to_string(samples.rows()) +
                                " samples is fewer than k=" + std::to_string(k));
  if (samples.cols() < 1) throw std::invalid_argument("fit_em: samples have no features");

  // shared fallback covariance for collapsed components
  Eigen::MatrixXd centered = samples.rowwise() - samples.colwise().mean();
  Eigen::MatrixXd global_cov =
      (centered.transpose() * centered) / static_cast<double>(samples.rows());
  global_cov = 0.5 * (global_cov + global_cov.transpose());

  EmResult result;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < config.n_restarts; ++r) {
    EmRun run = run_em_once(samples, k, config, mix_seed(config.seed, r), global_cov);
    const double ll = run.history.back();
    result.restart_histories.push_back(std::move(run.history));
    if (ll > best_ll) {
      best_ll = ll;
      result.best_restart = r;
      result.params = std::move(run.params);
      result.converged = run.converged;
    }
  }
  result.final_log_likelihood = best_ll;
  return result;
}

}  // namespace agenet
