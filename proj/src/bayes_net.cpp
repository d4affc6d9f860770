#include "bayes_net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "rng.hpp"

namespace agenet {

void BnModel::validate() const {
  const Eigen::Index d = dim();
  if (d == 0) throw std::invalid_argument("BnModel: no selected features");
  for (int a = 0; a < kNumAgeGroups; ++a) {
    for (int s = 0; s < kNumSleepStates; ++s) {
      gmms[a][s].validate();
      if (gmms[a][s].dim() != d)
        throw std::invalid_argument("BnModel: GMM dimension mismatch in cell (" +
                                    AgeGroup{a}.label() + ", " +
                                    to_string(static_cast<SleepState>(s)) + ")");
    }
    if (!(qs_prob[a] > 0.0 && qs_prob[a] < 1.0))
      throw std::invalid_argument("BnModel: qs_prob outside (0,1) for group " +
                                  AgeGroup{a}.label());
  }
  double prior_sum = 0.0;
  for (double lp : age_log_prior) prior_sum += std::exp(lp);
  if (std::abs(prior_sum - 1.0) > 1e-12)
    throw std::invalid_argument("BnModel: exp(age_log_prior) sums to " +
                                std::to_string(prior_sum));
  if (standardization.shift.size() != d || standardization.scale.size() != d)
    throw std::invalid_argument("BnModel: standardization dimension mismatch");
  if ((standardization.scale.array() <= 0.0).any())
    throw std::invalid_argument("BnModel: non-positive standardization scale");
  for (int f : feature_indices)
    if (f < 0 || f >= raw_feature_count)
      throw std::invalid_argument("BnModel: feature index " + std::to_string(f) +
                                  " outside raw feature count");
}

Eigen::MatrixXd BnModel::project(const Recording& recording) const {
  if (recording.raw_dim() != raw_feature_count)
    throw std::invalid_argument("recording " + recording.recording_id + " has " +
                                std::to_string(recording.raw_dim()) +
                                " raw features, model expects " +
                                std::to_string(raw_feature_count));
  Eigen::MatrixXd selected(recording.epoch_count(), dim());
  for (Eigen::Index j = 0; j < dim(); ++j)
    selected.col(j) = recording.epochs.col(feature_indices[j]);
  return standardization.apply(selected);
}

BnModel train(const Dataset& dataset, int d, int k_qs, int k_nonqs, const EmConfig& em,
              const std::vector<int>& selected, TrainDiagnostics* diagnostics) {
  em.validate();
  if (d < 1 || static_cast<int>(selected.size()) != d)
    throw std::invalid_argument("train: selected feature list length " +
                                std::to_string(selected.size()) + " does not match d=" +
                                std::to_string(d));
  if (k_qs < 1 || k_nonqs < 1)
    throw std::invalid_argument("train: component counts must be positive");
  if (dataset.recordings.empty()) throw std::invalid_argument("train: empty dataset");
  for (int f : selected)
    if (f < 0 || f >= dataset.feature_count())
      throw std::invalid_argument("train: selected feature index " + std::to_string(f) +
                                  " outside raw feature count");

  // gather per-cell rows (selected columns only)
  std::array<std::array<std::vector<Eigen::Index>, kNumSleepStates>, kNumAgeGroups> cell_rows;
  Eigen::MatrixXd all(static_cast<Eigen::Index>(dataset.total_epochs()), d);
  Eigen::Index row = 0;
  std::vector<int> row_cell_age, row_cell_state;
  row_cell_age.reserve(static_cast<std::size_t>(all.rows()));
  row_cell_state.reserve(static_cast<std::size_t>(all.rows()));
  for (const auto& rec : dataset.recordings) {
    if (!rec.sleep_labels)
      throw std::invalid_argument("train: recording " + rec.recording_id +
                                  " has no sleep labels; supervised training requires them");
    if (static_cast<Eigen::Index>(rec.sleep_labels->size()) != rec.epoch_count())
      throw std::invalid_argument("train: recording " + rec.recording_id +
                                  " label count does not match epoch count");
    const AgeGroup g = age_group_of(rec.pma_weeks);
    for (Eigen::Index i = 0; i < rec.epoch_count(); ++i) {
      for (int j = 0; j < d; ++j) all(row, j) = rec.epochs(i, selected[j]);
      const int s = static_cast<int>((*rec.sleep_labels)[static_cast<std::size_t>(i)]);
      cell_rows[g.index][s].push_back(row);
      row_cell_age.push_back(g.index);
      row_cell_state.push_back(s);
      ++row;
    }
  }

  BnModel model;
  model.feature_indices = selected;
  model.raw_feature_count = dataset.feature_count();
  model.settings = {k_qs, k_nonqs, em};

  // standardize on the pooled training epochs; constant features get unit scale
  model.standardization.shift = all.colwise().mean();
  Eigen::MatrixXd centered = all.rowwise() - model.standardization.shift.transpose();
  Eigen::VectorXd var = centered.array().square().colwise().mean();
  model.standardization.scale =
      var.array().sqrt().max(1e-12).matrix();
  Eigen::MatrixXd std_all = centered.array().rowwise() /
                            model.standardization.scale.transpose().array();

  for (int a = 0; a < kNumAgeGroups; ++a) {
    long long qs_count = 0, total = 0;
    for (int s = 0; s < kNumSleepStates; ++s) {
      const auto& rows = cell_rows[a][s];
      const int k = s == 0 ? k_qs : k_nonqs;
      const std::string cell = "(" + AgeGroup{a}.label() + " wk, " +
                               to_string(static_cast<SleepState>(s)) + ")";
      if (static_cast<int>(rows.size()) < k + 1)
        throw std::invalid_argument("train: cell " + cell + " has " +
                                    std::to_string(rows.size()) + " epochs, needs at least " +
                                    std::to_string(k + 1));
      Eigen::MatrixXd cell_samples(static_cast<Eigen::Index>(rows.size()), d);
      for (std::size_t i = 0; i < rows.size(); ++i) cell_samples.row(i) = std_all.row(rows[i]);
      EmConfig cell_em = em;
      cell_em.seed = mix_seed(em.seed, static_cast<std::uint64_t>(a * kNumSleepStates + s));
      EmResult fit = fit_em(cell_samples, k, cell_em);
      model.gmms[a][s] = std::move(fit.params);
      if (diagnostics) {
        diagnostics->cell_epochs[a][s] = static_cast<long long>(rows.size());
        diagnostics->cell_log_likelihood[a][s] = fit.final_log_likelihood;
        diagnostics->cell_converged[a][s] = fit.converged;
      }
      total += static_cast<long long>(rows.size());
      if (s == 0) qs_count = static_cast<long long>(rows.size());
    }
    // add-1/add-2 smoothing keeps ln q and ln(1-q) finite
    model.qs_prob[a] =
        (static_cast<double>(qs_count) + 1.0) / (static_cast<double>(total) + 2.0);
    model.age_log_prior[a] = -std::log(static_cast<double>(kNumAgeGroups));
  }
  return model;
}

AgePosterior log_posterior(const BnModel& model, const Recording& recording) {
  const Eigen::MatrixXd x = model.project(recording);
  AgePosterior post;
  for (int a = 0; a < kNumAgeGroups; ++a) {
    const double log_q = std::log(model.qs_prob[a]);
    const double log_1mq = std::log1p(-model.qs_prob[a]);
    const Eigen::VectorXd lq =
        GmmDensity(model.gmms[a][0]).log_densities(x).array() + log_q;
    const Eigen::VectorXd ln =
        GmmDensity(model.gmms[a][1]).log_densities(x).array() + log_1mq;
    // per-epoch two-term log-sum-exp, summed in epoch order
    double score = model.age_log_prior[a];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double hi = std::max(lq(i), ln(i));
      score += hi + std::log(std::exp(lq(i) - hi) + std::exp(ln(i) - hi));
    }
    post.log_scores[a] = score;
  }
  const double top = *std::max_element(post.log_scores.begin(), post.log_scores.end());
  double norm = 0.0;
  for (int a = 0; a < kNumAgeGroups; ++a) {
    post.probs[a] = std::exp(post.log_scores[a] - top);
    norm += post.probs[a];
  }
  for (double& p : post.probs) p /= norm;
  post.map_age = AgeGroup{static_cast<int>(
      std::max_element(post.log_scores.begin(), post.log_scores.end()) -
      post.log_scores.begin())};
  return post;
}

AgeGroup predict_age(const BnModel& model, const Recording& recording) {
  return log_posterior(model, recording).map_age;
}

SleepPrediction predict_sleep(const BnModel& model, const Recording& recording, AgeGroup age) {
  const Eigen::MatrixXd x = model.project(recording);
  const double log_q = std::log(model.qs_prob[age.index]);
  const double log_1mq = std::log1p(-model.qs_prob[age.index]);
  const Eigen::VectorXd lq =
      GmmDensity(model.gmm(age, SleepState::QS)).log_densities(x).array() + log_q;
  const Eigen::VectorXd ln =
      GmmDensity(model.gmm(age, SleepState::NonQS)).log_densities(x).array() + log_1mq;
  SleepPrediction pred;
  pred.states.reserve(static_cast<std::size_t>(x.rows()));
  pred.qs_posterior.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double hi = std::max(lq(i), ln(i));
    const double pq = std::exp(lq(i) - hi);
    const double pn = std::exp(ln(i) - hi);
    pred.qs_posterior.push_back(pq / (pq + pn));
    pred.states.push_back(lq(i) >= ln(i) ? SleepState::QS : SleepState::NonQS);
  }
  return pred;
}

}  // namespace agenet
