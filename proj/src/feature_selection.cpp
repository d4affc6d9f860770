#include "feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace agenet {

void MrmrConfig::validate() const {
  if (n_bins < 2) throw std::invalid_argument("MrmrConfig: n_bins must be >= 2");
  if (max_features < 1) throw std::invalid_argument("MrmrConfig: max_features must be positive");
}

std::vector<int> equal_frequency_bins(const Eigen::VectorXd& values, int n_bins) {
  const Eigen::Index n = values.size();
  if (n == 0) throw std::invalid_argument("equal_frequency_bins: empty input");
  std::vector<double> sorted(values.data(), values.data() + n);
  std::sort(sorted.begin(), sorted.end());
  // interior edges at ranks floor(j*n/n_bins); value strictly above an edge
  // moves up a bin, so an exact tie with the edge stays in the lower bin
  std::vector<double> edges;
  edges.reserve(n_bins - 1);
  for (int j = 1; j < n_bins; ++j) {
    const Eigen::Index pos = static_cast<Eigen::Index>(static_cast<std::size_t>(j) * n / n_bins);
    edges.push_back(sorted[std::min(pos, n - 1)]);
  }
  std::vector<int> bins(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int b = 0;
    for (double e : edges)
      if (values(i) > e) ++b;
    bins[i] = b;
  }
  return bins;
}

namespace {

// joint counts keyed by (x,y); marginals alongside
struct JointCounts {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> mx, my;
  double n = 0.0;
};

JointCounts count(const std::vector<int>& x, const std::vector<int>& y) {
  JointCounts c;
  c.n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    c.joint[{x[i], y[i]}] += 1.0;
    c.mx[x[i]] += 1.0;
    c.my[y[i]] += 1.0;
  }
  return c;
}

}  // namespace

double mutual_information(const std::vector<int>& x, const std::vector<int>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("mutual_information: length mismatch, " +
                                std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  if (x.empty()) throw std::invalid_argument("mutual_information: empty input");
  const JointCounts c = count(x, y);
  double mi = 0.0;
  for (const auto& [key, cnt] : c.joint) {
    const double pxy = cnt / c.n;
    const double px = c.mx.at(key.first) / c.n;
    const double py = c.my.at(key.second) / c.n;
    mi += pxy * std::log(pxy / (px * py));
  }
  return std::max(mi, 0.0);  // clamp the rounding tail of exact independence
}

double entropy(const std::vector<int>& x) {
  if (x.empty()) throw std::invalid_argument("entropy: empty input");
  std::map<int, double> m;
  for (int v : x) m[v] += 1.0;
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (const auto& [v, cnt] : m) h -= (cnt / n) * std::log(cnt / n);
  return std::max(h, 0.0);
}

FeatureRanking select(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                      const MrmrConfig& config) {
  config.validate();
  const Eigen::Index n = features.rows();
  const int m = static_cast<int>(features.cols());
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("select: row count " + std::to_string(n) +
                                " does not match label count " + std::to_string(labels.size()));
  if (n < config.n_bins)
    throw std::invalid_argument("select: " + std::to_string(n) + " rows is fewer than n_bins=" +
                                std::to_string(config.n_bins));
  if (config.max_features > m)
    throw std::invalid_argument("select: max_features exceeds raw feature count");
  if (std::all_of(labels.begin(), labels.end(), [&](int v) { return v == labels.front(); }))
    throw std::invalid_argument("select: label vector is constant, relevance undefined");

  std::vector<std::vector<int>> binned(m);
  for (int f = 0; f < m; ++f) binned[f] = equal_frequency_bins(features.col(f), config.n_bins);

  std::vector<double> relevance(m);
  for (int f = 0; f < m; ++f) relevance[f] = mutual_information(binned[f], labels);

  FeatureRanking ranking;
  std::vector<bool> taken(m, false);
  std::vector<double> redundancy_sum(m, 0.0);
  for (int step = 0; step < config.max_features; ++step) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int f = 0; f < m; ++f) {
      if (taken[f]) continue;
      const double penalty = step == 0 ? 0.0 : redundancy_sum[f] / step;
      const double score = relevance[f] - penalty;
      if (score > best_score) {  // strict: equal scores keep the lowest index
        best_score = score;
        best = f;
      }
    }
    taken[best] = true;
    ranking.indices.push_back(best);
    ranking.scores.push_back(best_score);
    if (step + 1 < config.max_features)
      for (int f = 0; f < m; ++f)
        if (!taken[f]) redundancy_sum[f] += mutual_information(binned[f], binned[best]);
  }
  return ranking;
}

std::vector<int> augmented_labels(const Dataset& dataset) {
  std::vector<int> out;
  out.reserve(dataset.total_epochs());
  for (const auto& rec : dataset.recordings) {
    if (!rec.sleep_labels)
      throw std::invalid_argument("augmented_labels: recording " + rec.recording_id +
                                  " has no sleep labels");
    const AgeGroup g = age_group_of(rec.pma_weeks);
    for (SleepState s : *rec.sleep_labels) out.push_back(augment(g, s));
  }
  return out;
}

Eigen::MatrixXd stacked_epochs(const Dataset& dataset) {
  const std::size_t total = dataset.total_epochs();
  if (total == 0) return {};
  Eigen::MatrixXd out(static_cast<Eigen::Index>(total), dataset.recordings.front().raw_dim());
  Eigen::Index row = 0;
  for (const auto& rec : dataset.recordings) {
    out.middleRows(row, rec.epoch_count()) = rec.epochs;
    row += rec.epoch_count();
  }
  return out;
}

}  // namespace agenet
