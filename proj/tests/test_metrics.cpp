#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "../src/metrics.hpp"
#include "../vendor/doctest.h"

using namespace agenet;

namespace {

AgreementTable table(std::vector<std::pair<int, int>> pairs, int nc, Scale scale) {
  AgreementTable t;
  t.pairs = std::move(pairs);
  t.n_categories = nc;
  t.scale = scale;
  return t;
}

// n copies of (a,b)
void add(std::vector<std::pair<int, int>>& pairs, int a, int b, int n) {
  for (int i = 0; i < n; ++i) pairs.emplace_back(a, b);
}

}  // namespace

TEST_CASE("confusion matrix counts, accuracy, and per-class accuracy") {
  const std::vector<int> truth = {0, 1, 2, 0, 1};
  const std::vector<int> pred = {0, 1, 1, 2, 1};
  const ConfusionMatrix cm = confusion(truth, pred, 3);

  CHECK(cm.counts(0, 0) == 1);
  CHECK(cm.counts(0, 2) == 1);
  CHECK(cm.counts(1, 1) == 2);
  CHECK(cm.counts(2, 1) == 1);
  CHECK(cm.counts.sum() == 5);
  CHECK(cm.total() == 5);
  CHECK(cm.accuracy() == doctest::Approx(3.0 / 5.0).epsilon(1e-15));

  const std::vector<double> pc = cm.per_class_accuracy();
  REQUIRE(pc.size() == 3);
  CHECK(pc[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pc[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pc[2] == 0.0);
}

TEST_CASE("confusion matrix marks absent classes NaN and empty input NaN") {
  const ConfusionMatrix cm = confusion({0, 0, 1}, {0, 1, 1}, 4);
  const std::vector<double> pc = cm.per_class_accuracy();
  REQUIRE(pc.size() == 4);
  CHECK_FALSE(std::isnan(pc[0]));
  CHECK_FALSE(std::isnan(pc[1]));
  CHECK(std::isnan(pc[2]));
  CHECK(std::isnan(pc[3]));

  const ConfusionMatrix empty = confusion({}, {}, 3);
  CHECK(empty.total() == 0);
  CHECK(std::isnan(empty.accuracy()));
}

TEST_CASE("confusion matrix rejects bad input") {
  CHECK_THROWS_AS(confusion({0, 1}, {0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(confusion({0, 2}, {0, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(confusion({0, -1}, {0, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(confusion({0, 1}, {0, 5}, 2), std::invalid_argument);
}

TEST_CASE("alpha matches hand-computed nominal table near chance") {
  // 5 agreements per category plus 10 symmetric disagreements: barely
  // better than chance
  std::vector<std::pair<int, int>> pairs;
  add(pairs, 0, 0, 5);
  add(pairs, 1, 1, 5);
  add(pairs, 0, 1, 5);
  add(pairs, 1, 0, 5);
  const AlphaResult r = krippendorff_alpha(table(pairs, 2, Scale::Nominal));
  CHECK_FALSE(r.degenerate);
  CHECK(std::abs(r.alpha - 1.0 / 40.0) < 1e-12);
}

TEST_CASE("alpha matches hand-computed three-category table on both scales") {
  std::vector<std::pair<int, int>> pairs;
  add(pairs, 0, 0, 3);
  add(pairs, 1, 1, 3);
  add(pairs, 2, 2, 3);
  add(pairs, 0, 2, 1);

  const AlphaResult nom = krippendorff_alpha(table(pairs, 3, Scale::Nominal));
  CHECK(std::abs(nom.alpha - 6.0 / 7.0) < 1e-12);

  // the lone disagreement spans the full category range, so the ordinal
  // metric punishes it harder than the nominal one
  const AlphaResult ord = krippendorff_alpha(table(pairs, 3, Scale::Ordinal));
  CHECK(std::abs(ord.alpha - 51.0 / 70.0) < 1e-12);
  CHECK(ord.alpha < nom.alpha);
}

TEST_CASE("alpha matches hand-computed unbalanced nominal table") {
  std::vector<std::pair<int, int>> pairs;
  add(pairs, 0, 0, 4);
  add(pairs, 1, 1, 3);
  add(pairs, 2, 2, 2);
  add(pairs, 0, 1, 1);
  add(pairs, 2, 0, 1);
  const AlphaResult r = krippendorff_alpha(table(pairs, 3, Scale::Nominal));
  CHECK(std::abs(r.alpha - 113.0 / 155.0) < 1e-12);
}

TEST_CASE("ordinal alpha rewards near-miss disagreements over distant ones") {
  // same agreement mass and the same number of disagreeing pairs; only the
  // span of the disagreements differs
  std::vector<std::pair<int, int>> agree;
  for (int c = 0; c < 6; ++c) add(agree, c, c, 4);

  std::vector<std::pair<int, int>> adjacent = agree;
  add(adjacent, 0, 1, 1);
  add(adjacent, 1, 0, 1);
  add(adjacent, 2, 3, 1);
  add(adjacent, 3, 2, 1);
  add(adjacent, 4, 5, 1);
  add(adjacent, 5, 4, 1);

  std::vector<std::pair<int, int>> spanning = agree;
  add(spanning, 0, 5, 3);
  add(spanning, 5, 0, 3);

  const AlphaResult near = krippendorff_alpha(table(adjacent, 6, Scale::Ordinal));
  const AlphaResult far = krippendorff_alpha(table(spanning, 6, Scale::Ordinal));
  CHECK(std::abs(near.alpha - 1691.0 / 1750.0) < 1e-12);
  CHECK(std::abs(far.alpha - 12219.0 / 43430.0) < 1e-12);
  CHECK(near.alpha > far.alpha);

  // nominal sees the same observed disagreement mass in both tables; only
  // the marginals entering the chance term differ, so the separation is a
  // tiny fraction of the ordinal gap
  const AlphaResult near_nom = krippendorff_alpha(table(adjacent, 6, Scale::Nominal));
  const AlphaResult far_nom = krippendorff_alpha(table(spanning, 6, Scale::Nominal));
  CHECK(std::abs(near_nom.alpha - far_nom.alpha) < 0.01);
  CHECK(near.alpha - far.alpha > 50.0 * std::abs(near_nom.alpha - far_nom.alpha));
}

TEST_CASE("perfect agreement over several categories gives alpha 1") {
  std::vector<std::pair<int, int>> pairs;
  add(pairs, 0, 0, 4);
  add(pairs, 1, 1, 4);
  add(pairs, 2, 2, 4);
  for (Scale s : {Scale::Nominal, Scale::Ordinal}) {
    const AlphaResult r = krippendorff_alpha(table(pairs, 3, s));
    CHECK(r.alpha == 1.0);
    CHECK_FALSE(r.degenerate);
  }
}

TEST_CASE("single observed category degenerates to alpha 1 with flag") {
  std::vector<std::pair<int, int>> pairs;
  add(pairs, 1, 1, 5);
  const AlphaResult r = krippendorff_alpha(table(pairs, 3, Scale::Ordinal));
  CHECK(r.alpha == 1.0);
  CHECK(r.degenerate);
}

TEST_CASE("binary ordinal alpha equals binary nominal alpha") {
  // with two categories the ordinal distance is a constant multiple of the
  // nominal one, which cancels in D_o / D_e
  std::vector<std::pair<int, int>> pairs;
  add(pairs, 0, 0, 7);
  add(pairs, 1, 1, 9);
  add(pairs, 0, 1, 2);
  add(pairs, 1, 0, 3);
  const AlphaResult nom = krippendorff_alpha(table(pairs, 2, Scale::Nominal));
  const AlphaResult ord = krippendorff_alpha(table(pairs, 2, Scale::Ordinal));
  CHECK(std::abs(nom.alpha - ord.alpha) < 1e-12);
}

TEST_CASE("nominal alpha is invariant to relabeling categories") {
  std::vector<std::pair<int, int>> pairs;
  add(pairs, 0, 0, 4);
  add(pairs, 1, 1, 3);
  add(pairs, 2, 2, 2);
  add(pairs, 0, 1, 1);
  add(pairs, 2, 0, 1);
  const AlphaResult base = krippendorff_alpha(table(pairs, 3, Scale::Nominal));

  const int perm[3] = {2, 0, 1};
  std::vector<std::pair<int, int>> relabeled;
  for (const auto& [a, b] : pairs) relabeled.emplace_back(perm[a], perm[b]);
  const AlphaResult r = krippendorff_alpha(table(relabeled, 3, Scale::Nominal));
  CHECK(std::abs(r.alpha - base.alpha) < 1e-12);
}

TEST_CASE("ordinal alpha is invariant to reversing the category order") {
  std::vector<std::pair<int, int>> pairs;
  add(pairs, 0, 0, 5);
  add(pairs, 1, 1, 4);
  add(pairs, 2, 2, 6);
  add(pairs, 3, 3, 3);
  add(pairs, 0, 2, 2);
  add(pairs, 3, 1, 1);
  const AlphaResult base = krippendorff_alpha(table(pairs, 4, Scale::Ordinal));

  std::vector<std::pair<int, int>> reversed;
  for (const auto& [a, b] : pairs) reversed.emplace_back(3 - a, 3 - b);
  const AlphaResult r = krippendorff_alpha(table(reversed, 4, Scale::Ordinal));
  CHECK(std::abs(r.alpha - base.alpha) < 1e-12);
}

TEST_CASE("turning a disagreement into an agreement raises alpha") {
  std::vector<std::pair<int, int>> before;
  add(before, 0, 0, 4);
  add(before, 1, 1, 3);
  add(before, 2, 2, 2);
  add(before, 0, 1, 1);
  add(before, 2, 0, 1);

  std::vector<std::pair<int, int>> after;
  add(after, 0, 0, 5);
  add(after, 1, 1, 3);
  add(after, 2, 2, 2);
  add(after, 2, 0, 1);

  for (Scale s : {Scale::Nominal, Scale::Ordinal}) {
    const double a0 = krippendorff_alpha(table(before, 3, s)).alpha;
    const double a1 = krippendorff_alpha(table(after, 3, s)).alpha;
    CHECK(a1 > a0);
  }
}

TEST_CASE("alpha input validation") {
  std::vector<std::pair<int, int>> one;
  add(one, 0, 1, 1);
  CHECK_THROWS_AS(krippendorff_alpha(table({}, 2, Scale::Nominal)), std::invalid_argument);
  CHECK_THROWS_AS(krippendorff_alpha(table(one, 2, Scale::Nominal)), std::invalid_argument);

  std::vector<std::pair<int, int>> bad;
  add(bad, 0, 0, 2);
  add(bad, 0, 3, 1);
  CHECK_THROWS_AS(krippendorff_alpha(table(bad, 3, Scale::Nominal)), std::invalid_argument);

  std::vector<std::pair<int, int>> neg;
  add(neg, 0, 0, 2);
  add(neg, -1, 0, 1);
  CHECK_THROWS_AS(krippendorff_alpha(table(neg, 3, Scale::Nominal)), std::invalid_argument);

  std::vector<std::pair<int, int>> ok;
  add(ok, 0, 0, 2);
  CHECK_THROWS_AS(krippendorff_alpha(table(ok, 0, Scale::Nominal)), std::invalid_argument);
}

TEST_CASE("interpret_alpha bands") {
  CHECK(interpret_alpha(1.0) == "almost-perfect");
  CHECK(interpret_alpha(0.91) == "almost-perfect");
  CHECK(interpret_alpha(0.8) == "almost-perfect");
  CHECK(interpret_alpha(0.79) == "substantial");
  CHECK(interpret_alpha(0.6) == "substantial");
  CHECK(interpret_alpha(0.59) == "moderate");
  CHECK(interpret_alpha(0.4) == "moderate");
  CHECK(interpret_alpha(0.39) == "fair");
  CHECK(interpret_alpha(0.2) == "fair");
  CHECK(interpret_alpha(0.19) == "slight");
  CHECK(interpret_alpha(0.0) == "slight");
  CHECK(interpret_alpha(-0.01) == "poor");
  CHECK(interpret_alpha(-1.0) == "poor");
  CHECK_THROWS_AS(interpret_alpha(1.5), std::invalid_argument);
  CHECK_THROWS_AS(interpret_alpha(-1.5), std::invalid_argument);
  CHECK_THROWS_AS(interpret_alpha(std::nan("")), std::invalid_argument);
}
