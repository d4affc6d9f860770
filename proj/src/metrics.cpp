#include "metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace agenet {

double ConfusionMatrix::accuracy() const {
  const long long t = total();
  if (t == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(counts.cast<long long>().trace()) / static_cast<double>(t);
}

std::vector<double> ConfusionMatrix::per_class_accuracy() const {
  std::vector<double> out(counts.rows());
  for (Eigen::Index c = 0; c < counts.rows(); ++c) {
    const long long row_sum = counts.row(c).cast<long long>().sum();
    out[c] = row_sum == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : static_cast<double>(counts(c, c)) / static_cast<double>(row_sum);
  }
  return out;
}

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted,
                          int n_classes) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("confusion: length mismatch, " + std::to_string(truth.size()) +
                                " vs " + std::to_string(predicted.size()));
  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(n_classes, n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= n_classes || predicted[i] < 0 || predicted[i] >= n_classes)
      throw std::invalid_argument("confusion: label out of range at item " + std::to_string(i));
    cm.counts(truth[i], predicted[i]) += 1;
  }
  return cm;
}

AlphaResult krippendorff_alpha(const AgreementTable& table) {
  const int nc = table.n_categories;
  if (nc < 1) throw std::invalid_argument("krippendorff_alpha: no categories");
  if (table.pairs.size() < 2)
    throw std::invalid_argument("krippendorff_alpha: need at least 2 pairs, got " +
                                std::to_string(table.pairs.size()));

  // coincidence matrix: each unit contributes both orderings
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(nc, nc);
  for (const auto& [a, b] : table.pairs) {
    if (a < 0 || a >= nc || b < 0 || b >= nc)
      throw std::invalid_argument("krippendorff_alpha: value outside category set");
    o(a, b) += 1.0;
    o(b, a) += 1.0;
  }
  const Eigen::VectorXd marg = o.rowwise().sum();
  const double n = marg.sum();  // = 2 * pairs

  // squared distance between categories c < k
  auto dist2 = [&](int c, int k) {
    if (table.scale == Scale::Nominal) return 1.0;
    double s = 0.0;
    for (int g = c; g <= k; ++g) s += marg(g);
    s -= 0.5 * (marg(c) + marg(k));
    return s * s;
  };

  double observed = 0.0, expected = 0.0;
  for (int c = 0; c < nc; ++c) {
    for (int k = c + 1; k < nc; ++k) {
      const double d2 = dist2(c, k);
      observed += 2.0 * o(c, k) * d2;          // o is symmetric
      expected += 2.0 * marg(c) * marg(k) * d2;
    }
  }
  const double d_o = observed / n;
  const double d_e = expected / (n * (n - 1.0));
  if (d_e == 0.0) return {1.0, true};
  return {1.0 - d_o / d_e, false};
}

std::string interpret_alpha(double alpha) {
  if (std::isnan(alpha) || alpha < -1.0 || alpha > 1.0)
    throw std::invalid_argument("interpret_alpha: value outside [-1,1]");
  if (alpha >= 0.8) return "almost-perfect";
  if (alpha >= 0.6) return "substantial";
  if (alpha >= 0.4) return "moderate";
  if (alpha >= 0.2) return "fair";
  if (alpha >= 0.0) return "slight";
  return "poor";
}

}  // namespace agenet
