#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "../src/evaluation.hpp"
#include "../src/rng.hpp"
#include "../vendor/doctest.h"

using namespace agenet;

namespace {

double pma_for(int g) { return 29.0 + 2.0 * g; }

// Longitudinal cohort: every patient contributes one recording per age
// group, so any patient subset spans all 12 cells. Labels follow a fixed
// 1-in-3 QS cycle; informative features sit at mean_of(g) with a small
// state shift on axis 0, and `noise` pure-noise columns follow.
Dataset make_longitudinal(int n_patients, int epochs, std::uint64_t seed,
                          const std::function<Eigen::VectorXd(int)>& mean_of, int noise) {
  Dataset ds;
  const int d_inf = static_cast<int>(mean_of(0).size());
  for (int f = 0; f < d_inf + noise; ++f) ds.feature_names.push_back("f" + std::to_string(f));
  Rng rng(seed);
  for (int p = 0; p < n_patients; ++p) {
    for (int g = 0; g < kNumAgeGroups; ++g) {
      Recording r;
      r.patient_id = "p" + std::to_string(p);
      r.recording_id = "r" + std::to_string(p) + "_g" + std::to_string(g);
      r.pma_weeks = pma_for(g);
      r.epochs.resize(epochs, d_inf + noise);
      std::vector<SleepState> labels(static_cast<std::size_t>(epochs));
      const Eigen::VectorXd mu = mean_of(g);
      for (int i = 0; i < epochs; ++i) {
        const bool qs = i % 3 == 0;
        labels[static_cast<std::size_t>(i)] = qs ? SleepState::QS : SleepState::NonQS;
        for (int c = 0; c < d_inf; ++c)
          r.epochs(i, c) = mu(c) + (c == 0 ? (qs ? 0.5 : -0.5) : 0.0) + rng.normal();
        for (int c = d_inf; c < d_inf + noise; ++c) r.epochs(i, c) = rng.normal();
      }
      r.sleep_labels = std::move(labels);
      ds.recordings.push_back(std::move(r));
    }
  }
  return ds;
}

Eigen::VectorXd vec1(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

EmConfig quick_em(std::uint64_t seed) {
  EmConfig em;
  em.max_iters = 60;
  em.tol = 1e-5;
  em.n_restarts = 1;
  em.seed = seed;
  return em;
}

template <typename F>
std::string thrown_message(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("default_grid is the full 4x3x3 cross product") {
  const std::vector<GridPoint> g = default_grid();
  REQUIRE(g.size() == 36);
  CHECK(g.front().d == 2);
  CHECK(g.front().k_qs == 1);
  CHECK(g.front().k_nonqs == 1);
  CHECK(g.back().d == 12);
  CHECK(g.back().k_qs == 3);
  CHECK(g.back().k_nonqs == 3);
  std::set<std::array<int, 3>> seen;
  for (const auto& gp : g) seen.insert({gp.d, gp.k_qs, gp.k_nonqs});
  CHECK(seen.size() == 36);
}

TEST_CASE("split_by_patient groups recordings and balances folds") {
  // interleaved recordings so patient grouping is actually exercised
  Dataset ds;
  ds.feature_names = {"f0"};
  const std::vector<std::string> pattern = {"pG", "pA", "pC", "pA", "pE", "pB",
                                            "pG", "pD", "pF", "pC", "pG", "pB"};
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    Recording r;
    r.patient_id = pattern[i];
    r.recording_id = "r" + std::to_string(i);
    r.pma_weeks = 33.0;
    r.epochs = Eigen::MatrixXd::Constant(1, 1, static_cast<double>(i));
    ds.recordings.push_back(std::move(r));
  }

  const std::vector<int> folds = split_by_patient(ds, 3, 4);
  REQUIRE(folds.size() == 12);

  std::map<std::string, int> fold_of;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    CHECK(folds[i] >= 0);
    CHECK(folds[i] < 3);
    const auto it = fold_of.find(pattern[i]);
    if (it == fold_of.end())
      fold_of[pattern[i]] = folds[i];
    else
      CHECK(it->second == folds[i]);  // same patient, same fold
  }

  std::array<int, 3> patients_per_fold{};
  for (const auto& [p, f] : fold_of) ++patients_per_fold[static_cast<std::size_t>(f)];
  const auto [lo, hi] = std::minmax_element(patients_per_fold.begin(), patients_per_fold.end());
  CHECK(*hi - *lo <= 1);  // 7 patients over 3 folds -> sizes {3,2,2}
  CHECK(*lo >= 2);

  CHECK(split_by_patient(ds, 3, 4) == folds);  // deterministic
  CHECK(split_by_patient(ds, 3, 5) != folds);  // seed-sensitive

  CHECK_THROWS_AS(split_by_patient(ds, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(split_by_patient(ds, 8, 0), std::invalid_argument);  // 7 patients
}

TEST_CASE("grid_search scores a one-point grid and reports it") {
  const Dataset ds = make_longitudinal(6, 18, 21, [](int g) { return vec1(5.0 * g); }, 1);
  CvPlan plan;
  plan.inner_folds = 3;
  plan.grid = {{1, 1, 1}};
  plan.seed = 2;
  const GridSearchResult r = grid_search(ds, plan, quick_em(2));
  CHECK(r.best.d == 1);
  CHECK(r.best.k_qs == 1);
  CHECK(r.best.k_nonqs == 1);
  CHECK(r.best_score == 1.0);  // fully separable
  CHECK(r.warnings.empty());
}

TEST_CASE("grid_search reduces the inner folds when patients are scarce") {
  const Dataset ds = make_longitudinal(5, 18, 8, [](int g) { return vec1(4.0 * g); }, 0);
  CvPlan plan;
  plan.inner_folds = 18;
  plan.grid = {{1, 1, 1}};
  plan.seed = 3;
  const GridSearchResult r = grid_search(ds, plan, quick_em(3));
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("reduced from 18 to 4") != std::string::npos);
  CHECK(r.warnings[0].find("5 patients") != std::string::npos);
  CHECK(r.best_score == 1.0);
}

TEST_CASE("grid_search refuses a split with too few patients") {
  const Dataset ds = make_longitudinal(2, 15, 8, [](int g) { return vec1(4.0 * g); }, 0);
  CvPlan plan;
  plan.grid = {{1, 1, 1}};
  const std::string msg = thrown_message([&] { grid_search(ds, plan, quick_em(1)); });
  CHECK(msg.find("cannot support") != std::string::npos);

  CvPlan empty;
  empty.grid.clear();
  const Dataset ok = make_longitudinal(6, 15, 8, [](int g) { return vec1(4.0 * g); }, 0);
  CHECK_THROWS_AS(grid_search(ok, empty, quick_em(1)), std::invalid_argument);
}

TEST_CASE("grid-point ties break toward smaller d, then smaller k sum, then k_qs") {
  const Dataset ds = make_longitudinal(6, 24, 31, [](int g) { return vec1(5.0 * g); }, 2);
  CvPlan plan;
  plan.inner_folds = 3;
  plan.seed = 5;
  const EmConfig em = quick_em(5);

  // everything is perfectly separable, so every point scores 1.0
  plan.grid = {{3, 1, 1}, {1, 1, 1}};
  GridSearchResult r = grid_search(ds, plan, em);
  CHECK(r.best_score == 1.0);
  CHECK(r.best.d == 1);

  plan.grid = {{1, 2, 1}, {1, 1, 2}};  // equal sums: smaller k_qs wins
  r = grid_search(ds, plan, em);
  CHECK(r.best_score == 1.0);
  CHECK(r.best.k_qs == 1);
  CHECK(r.best.k_nonqs == 2);

  plan.grid = {{1, 1, 3}, {1, 2, 1}};  // sums 4 vs 3: smaller sum wins
  r = grid_search(ds, plan, em);
  CHECK(r.best_score == 1.0);
  CHECK(r.best.k_qs == 2);
  CHECK(r.best.k_nonqs == 1);
}

TEST_CASE("grid search prefers the dimensionality that separates the groups") {
  // age centers on the vertices of a cube: every single axis collapses at
  // least three groups, all three axes together separate everything, and
  // extra dimensions only add noise
  const double sep = 6.0;
  static const double vertex[kNumAgeGroups][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0},
                                                  {0, 0, 1}, {1, 1, 0}, {0, 1, 1}};
  int chose_three = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const Dataset ds = make_longitudinal(
        6, 20, 100 + static_cast<std::uint64_t>(t),
        [&](int g) {
          Eigen::VectorXd m(3);
          for (int c = 0; c < 3; ++c) m(c) = sep * vertex[g][c];
          return m;
        },
        7);
    CvPlan plan;
    plan.inner_folds = 3;
    plan.grid = {{1, 1, 1}, {3, 1, 1}, {10, 1, 1}};
    plan.seed = 200 + static_cast<std::uint64_t>(t);
    const GridSearchResult r = grid_search(ds, plan, quick_em(300 + t));
    if (r.best.d == 3) ++chose_three;
  }
  CHECK(chose_three >= 16);
}

TEST_CASE("run_cv produces a consistent, deterministic report") {
  Dataset ds = make_longitudinal(8, 20, 77, [](int g) { return vec1(4.0 * g); }, 1);
  // a labeled single-epoch recording cannot carry a sleep alpha
  ds.recordings[5].epochs.conservativeResize(1, Eigen::NoChange);
  ds.recordings[5].sleep_labels->resize(1);
  const std::string tiny_id = ds.recordings[5].recording_id;

  CvPlan plan;
  plan.outer_folds = 4;
  plan.inner_folds = 3;
  plan.grid = {{1, 1, 1}};
  plan.seed = 13;
  const EmConfig em = quick_em(13);
  const CvReport rep = run_cv(ds, plan, em);

  // every dataset recording exactly once, in dataset order
  REQUIRE(rep.recordings.size() == ds.recordings.size());
  for (std::size_t i = 0; i < ds.recordings.size(); ++i) {
    CHECK(rep.recordings[i].recording_id == ds.recordings[i].recording_id);
    CHECK(rep.recordings[i].patient_id == ds.recordings[i].patient_id);
    CHECK(rep.recordings[i].true_group ==
          age_group_of(ds.recordings[i].pma_weeks).index);
  }

  // posterior rows are distributions and the prediction is their argmax
  for (const auto& row : rep.recordings) {
    double sum = 0.0;
    double top = -1.0;
    int arg = -1;
    for (int a = 0; a < kNumAgeGroups; ++a) {
      CHECK(row.posterior[a] >= 0.0);
      sum += row.posterior[a];
      if (row.posterior[a] > top) {
        top = row.posterior[a];
        arg = a;
      }
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(row.predicted_group == arg);
  }

  // outer folds partition patients
  std::map<std::string, std::set<int>> folds_of_patient;
  for (const auto& row : rep.recordings)
    folds_of_patient[row.patient_id].insert(row.fold);
  for (const auto& [p, fs] : folds_of_patient) CHECK(fs.size() == 1);

  // fold choices: one per fold, ascending, scores in range
  REQUIRE(rep.fold_choices.size() == 4);
  for (std::size_t f = 0; f < rep.fold_choices.size(); ++f) {
    CHECK(rep.fold_choices[f].fold == static_cast<int>(f));
    CHECK(rep.fold_choices[f].inner_score >= -1.0);
    CHECK(rep.fold_choices[f].inner_score <= 1.0);
  }

  // aggregates agree with the per-recording rows
  CHECK(rep.confusion.total() == static_cast<long long>(rep.recordings.size()));
  std::vector<std::pair<int, int>> pairs;
  long long diag = 0;
  for (const auto& row : rep.recordings) {
    pairs.push_back({row.true_group, row.predicted_group});
    if (row.true_group == row.predicted_group) ++diag;
  }
  CHECK(rep.accuracy ==
        doctest::Approx(static_cast<double>(diag) / static_cast<double>(pairs.size()))
            .epsilon(1e-15));
  const AlphaResult recomputed =
      krippendorff_alpha({pairs, kNumAgeGroups, Scale::Ordinal});
  CHECK(rep.alpha_ord.alpha == recomputed.alpha);
  CHECK(rep.alpha_ord.degenerate == recomputed.degenerate);

  // separable data: the protocol recovers everything
  CHECK(rep.accuracy == 1.0);
  CHECK(rep.alpha_ord.alpha == 1.0);

  // sleep alphas exist for labeled multi-epoch recordings only
  for (const auto& row : rep.recordings) {
    if (row.recording_id == tiny_id)
      CHECK(std::isnan(row.sleep_alpha));
    else
      CHECK(std::isfinite(row.sleep_alpha));
  }

  // bit-exact rerun
  const CvReport again = run_cv(ds, plan, em);
  CHECK(again.accuracy == rep.accuracy);
  CHECK(again.alpha_ord.alpha == rep.alpha_ord.alpha);
  REQUIRE(again.recordings.size() == rep.recordings.size());
  for (std::size_t i = 0; i < rep.recordings.size(); ++i) {
    CHECK(again.recordings[i].predicted_group == rep.recordings[i].predicted_group);
    CHECK(again.recordings[i].fold == rep.recordings[i].fold);
    for (int a = 0; a < kNumAgeGroups; ++a)
      CHECK(again.recordings[i].posterior[a] == rep.recordings[i].posterior[a]);
  }
}

TEST_CASE("run_cv stays near chance when features carry no signal") {
  for (std::uint64_t seed : {42, 43, 44}) {
    CAPTURE(seed);
    const Dataset ds =
        make_longitudinal(6, 15, seed, [](int) { return vec1(0.0); }, 1);
    CvPlan plan;
    plan.outer_folds = 3;
    plan.inner_folds = 2;
    plan.grid = {{1, 1, 1}};
    plan.seed = seed;
    const CvReport rep = run_cv(ds, plan, quick_em(seed));
    CHECK(rep.accuracy <= 0.5);
    if (!rep.alpha_ord.degenerate) {
      CHECK(rep.alpha_ord.alpha <= 0.45);
      CHECK(rep.alpha_ord.alpha >= -0.6);
    }
  }
}

TEST_CASE("run_cv names the outer fold that failed") {
  // group 5 lives in a single dedicated patient, so the fold holding that
  // patient out cannot train and the whole protocol must abort loudly
  Dataset ds = make_longitudinal(4, 15, 55, [](int g) { return vec1(3.0 * g); }, 0);
  ds.recordings.erase(
      std::remove_if(ds.recordings.begin(), ds.recordings.end(),
                     [](const Recording& r) { return age_group_of(r.pma_weeks).index == 5; }),
      ds.recordings.end());
  Rng rng(9);
  Recording lone;
  lone.patient_id = "pz";
  lone.recording_id = "rz";
  lone.pma_weeks = 39.0;
  lone.epochs.resize(15, 1);
  std::vector<SleepState> labels(15);
  for (int i = 0; i < 15; ++i) {
    labels[static_cast<std::size_t>(i)] = i % 3 == 0 ? SleepState::QS : SleepState::NonQS;
    lone.epochs(i, 0) = 15.0 + rng.normal();
  }
  lone.sleep_labels = std::move(labels);
  ds.recordings.push_back(std::move(lone));

  CvPlan plan;
  plan.outer_folds = 5;
  plan.inner_folds = 2;
  plan.grid = {{1, 1, 1}};
  plan.seed = 1;
  const std::string msg = thrown_message([&] { run_cv(ds, plan, quick_em(1)); });
  CHECK(msg.find("run_cv: outer fold") != std::string::npos);
  CHECK(msg.find("failed") != std::string::npos);
}

TEST_CASE("run_cv validates plan and dataset up front") {
  const Dataset ds = make_longitudinal(6, 15, 2, [](int g) { return vec1(3.0 * g); }, 0);
  const EmConfig em = quick_em(2);

  CvPlan plan;
  plan.outer_folds = 1;
  CHECK_THROWS_AS(run_cv(ds, plan, em), std::invalid_argument);

  plan = CvPlan{};
  plan.inner_folds = 0;
  CHECK_THROWS_AS(run_cv(ds, plan, em), std::invalid_argument);

  plan = CvPlan{};
  plan.mrmr_bins = 1;
  CHECK_THROWS_AS(run_cv(ds, plan, em), std::invalid_argument);

  plan = CvPlan{};
  plan.grid = {{0, 1, 1}};
  CHECK_THROWS_AS(run_cv(ds, plan, em), std::invalid_argument);

  plan = CvPlan{};
  plan.outer_folds = 3;
  plan.grid = {{5, 1, 1}};  // dataset has 1 feature
  const std::string too_wide = thrown_message([&] { run_cv(ds, plan, em); });
  CHECK(too_wide.find("exceeds the raw feature count") != std::string::npos);

  Dataset broken = ds;
  broken.recordings[2].epochs(0, 0) = std::nan("");
  plan = CvPlan{};
  plan.outer_folds = 3;
  plan.inner_folds = 2;
  plan.grid = {{1, 1, 1}};
  const std::string invalid = thrown_message([&] { run_cv(broken, plan, em); });
  CHECK(invalid.find("dataset invalid") != std::string::npos);
}
