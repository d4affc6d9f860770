#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "domain.hpp"
#include "gmm.hpp"

namespace agenet {

// Per-feature shift/scale fitted on training data and applied before every
// density evaluation. scale entries are strictly positive.
struct Standardization {
  Eigen::VectorXd shift;
  Eigen::VectorXd scale;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const {
    return (rows.rowwise() - shift.transpose()).array().rowwise() /
           scale.transpose().array();
  }
  Eigen::MatrixXd invert(const Eigen::MatrixXd& rows) const {
    return (rows.array().rowwise() * scale.transpose().array()).matrix().rowwise() +
           shift.transpose();
  }
};

// Settings the model was trained with; carried into the model file so a
// training run is reconstructible from its artifact.
struct TrainSettings {
  int k_qs = 1;
  int k_nonqs = 1;
  EmConfig em;
};

// The trained network: one GMM per (age group, sleep state) cell, per-age
// quiet-sleep probabilities, a uniform age prior, and the feature-space
// mapping (selected raw indices + standardization).
struct BnModel {
  std::array<std::array<GmmParams, kNumSleepStates>, kNumAgeGroups> gmms;  // [age][state]
  std::array<double, kNumAgeGroups> qs_prob{};       // p(QS | age), strictly inside (0,1)
  std::array<double, kNumAgeGroups> age_log_prior{}; // ln p(age), exp sums to 1
  std::vector<int> feature_indices;                  // selected raw-feature indices
  Standardization standardization;                   // over selected features
  Eigen::Index raw_feature_count = 0;
  TrainSettings settings;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(feature_indices.size()); }
  const GmmParams& gmm(AgeGroup a, SleepState s) const {
    return gmms[a.index][static_cast<int>(s)];
  }
  void validate() const;  // throws on any invariant violation

  // Selected + standardized view of a recording's epochs. Throws when the
  // recording's raw dimension differs from raw_feature_count.
  Eigen::MatrixXd project(const Recording& recording) const;
};

// Unnormalized per-age log posterior and its normalized counterpart.
struct AgePosterior {
  std::array<double, kNumAgeGroups> log_scores{};
  std::array<double, kNumAgeGroups> probs{};
  AgeGroup map_age;  // argmax of log_scores, lowest index on ties
};

struct SleepPrediction {
  std::vector<SleepState> states;
  std::vector<double> qs_posterior;  // p(QS | x_i, age) per epoch
};

// Per-cell fit facts, filled when a sink is passed to train().
struct TrainDiagnostics {
  std::array<std::array<long long, kNumSleepStates>, kNumAgeGroups> cell_epochs{};
  std::array<std::array<double, kNumSleepStates>, kNumAgeGroups> cell_log_likelihood{};
  std::array<std::array<bool, kNumSleepStates>, kNumAgeGroups> cell_converged{};
};

// Supervised fit: selects the given raw feature columns, standardizes them on
// the pooled labeled training epochs, fits one GMM per (age,state) cell by
// EM (k_qs / k_nonqs components), and estimates qs_prob with add-1/add-2
// Laplace smoothing. The age prior is uniform. Throws when sleep labels are
// missing or a cell has fewer than k+1 epochs, naming the cell.
BnModel train(const Dataset& dataset, int d, int k_qs, int k_nonqs, const EmConfig& em,
              const std::vector<int>& selected, TrainDiagnostics* diagnostics = nullptr);

// Per-recording age posterior: for each age, the prior plus the sum over
// epochs of the two-state log-sum-exp marginalization. No ±inf/NaN in the
// output for finite inputs.
AgePosterior log_posterior(const BnModel& model, const Recording& recording);

// MAP age group (AgePosterior::map_age).
AgeGroup predict_age(const BnModel& model, const Recording& recording);

// Per-epoch sleep decoding at a fixed age: argmax_s p(x_i|s,age) p(s|age),
// with the two-way posterior computed in the log domain. Exact ties decode
// to QS.
SleepPrediction predict_sleep(const BnModel& model, const Recording& recording, AgeGroup age);

}  // namespace agenet
