#pragma once

#include <Eigen/Dense>
#include <vector>

#include "domain.hpp"

namespace agenet {

struct MrmrConfig {
  int n_bins = 10;       // equal-frequency discretization bins, >= 2
  int max_features = 1;  // length of the returned ranking

  void validate() const;
};

// Greedy mRMR output, in selection order.
struct FeatureRanking {
  std::vector<int> indices;    // unique raw feature indices
  std::vector<double> scores;  // greedy objective value at each step
};

// Equal-frequency binning of a continuous column into n_bins codes 0..n_bins-1.
// Boundary ties go to the lower bin; assignments depend only on the ordering
// of values, so any strictly monotone transform leaves them unchanged.
std::vector<int> equal_frequency_bins(const Eigen::VectorXd& values, int n_bins);

// Plug-in mutual information (nats) from the joint empirical histogram of two
// discrete series, with 0*ln 0 := 0. Throws on length mismatch or empty input.
double mutual_information(const std::vector<int>& x, const std::vector<int>& y);

// Plug-in entropy (nats) of one discrete series.
double entropy(const std::vector<int>& x);

// Greedy mRMR, MID variant: the first feature maximizes I(f;label); each
// subsequent feature maximizes I(f;label) - mean_{s in S} I(f;f_s) over the
// already-selected set S. Rows of `features` are epochs. Ties break toward
// the lowest feature index. Throws when the label vector is constant
// (relevance undefined) or row count < n_bins.
FeatureRanking select(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                      const MrmrConfig& config);

// Per-epoch augmented labels augment(age_group_of(pma), sleep_label) across
// the whole dataset, in recording order. Throws when a recording has no
// sleep labels.
std::vector<int> augmented_labels(const Dataset& dataset);

// Row-stacks every epoch of the dataset, in recording order. Companion to
// augmented_labels: row i corresponds to label i.
Eigen::MatrixXd stacked_epochs(const Dataset& dataset);

}  // namespace agenet
