#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bayes_net.hpp"
#include "domain.hpp"
#include "feature_selection.hpp"
#include "gmm.hpp"
#include "metrics.hpp"

namespace agenet {

struct GridPoint {
  int d = 1;
  int k_qs = 1;
  int k_nonqs = 1;
};

// d in {2,4,8,12} x k in {1,2,3} for each state.
std::vector<GridPoint> default_grid();

struct CvPlan {
  int outer_folds = 10;
  int inner_folds = 18;
  std::vector<GridPoint> grid;  // empty -> default_grid() at run time
  std::uint64_t seed = 0;
  int mrmr_bins = 10;

  void validate() const;
};

// Fold id per recording. All recordings of a patient share one fold; fold
// sizes in patients differ by at most 1. Deterministic given the seed
// (patients sorted, Fisher-Yates shuffled, assigned round-robin).
std::vector<int> split_by_patient(const Dataset& dataset, int n_folds, std::uint64_t seed);

struct GridSearchResult {
  GridPoint best;
  double best_score = 0.0;  // pooled inner out-of-fold ordinal alpha on age
  std::vector<std::string> warnings;
};

// Inner patient CV over the grid: each inner training split gets its own
// mRMR ranking (computed once at the largest grid d; prefixes serve smaller
// d), every grid point is scored by ordinal alpha over the pooled inner
// out-of-fold age predictions, and ties break toward smaller d, then smaller
// k_qs+k_nonqs, then smaller k_qs. Grid points whose training fails on any
// inner fold are skipped with a warning; all skipped is an error.
GridSearchResult grid_search(const Dataset& training, const CvPlan& plan, const EmConfig& em);

struct FoldChoice {
  int fold = 0;
  GridPoint params;
  double inner_score = 0.0;
};

struct RecordingOutcome {
  std::string patient_id;
  std::string recording_id;
  int fold = 0;
  int true_group = 0;
  int predicted_group = 0;
  std::array<double, kNumAgeGroups> posterior{};
  // nominal alpha between decoded and labeled sleep states; NaN when the
  // recording has no labels or fewer than 2 epochs
  double sleep_alpha = 0.0;
  bool sleep_alpha_degenerate = false;
};

struct CvReport {
  std::vector<FoldChoice> fold_choices;
  std::vector<RecordingOutcome> recordings;  // dataset order; each exactly once
  double accuracy = 0.0;
  AlphaResult alpha_ord;
  ConfusionMatrix confusion;
  std::vector<std::string> warnings;
};

// Full nested protocol: per outer fold, grid search on the training portion,
// final training with the chosen parameters (mRMR refit on the full outer
// training split), prediction on the held-out recordings. Fold failures
// abort with the fold identified.
CvReport run_cv(const Dataset& dataset, const CvPlan& plan, const EmConfig& em);

}  // namespace agenet
