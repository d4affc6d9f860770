#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace agenet {

// Row = true class, column = predicted class.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  long long total() const { return counts.cast<long long>().sum(); }
  double accuracy() const;  // trace / total
  // diagonal / row sum; NaN for classes with an empty row (undefined)
  std::vector<double> per_class_accuracy() const;
};

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted,
                          int n_classes);

enum class Scale { Nominal, Ordinal };

// Paired two-rater labels over the category set 0..n_categories-1.
struct AgreementTable {
  std::vector<std::pair<int, int>> pairs;
  int n_categories = 0;
  Scale scale = Scale::Nominal;
};

struct AlphaResult {
  double alpha = 0.0;
  // true when expected disagreement is zero (every value identical across
  // both raters); alpha is then defined as 1 rather than erroring so CV
  // pipelines survive degenerate folds
  bool degenerate = false;
};

// Krippendorff's alpha = 1 - D_o/D_e via the two-rater coincidence-matrix
// formulation. Nominal distance is 0/1; ordinal distance between categories
// c < k is (sum_{g=c}^{k} n_g - (n_c+n_k)/2)^2 with n_g the coincidence
// marginals. Requires at least 2 pairs and in-range values.
AlphaResult krippendorff_alpha(const AgreementTable& table);

// Qualitative band for an alpha in [-1,1]:
//   [0.8, 1]   almost-perfect
//   [0.6, 0.8) substantial
//   [0.4, 0.6) moderate
//   [0.2, 0.4) fair
//   [0.0, 0.2) slight
//   [-1,  0.0) poor
std::string interpret_alpha(double alpha);

}  // namespace agenet
