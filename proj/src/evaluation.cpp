#include "evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <limits>
#include <stdexcept>

#include "rng.hpp"

namespace agenet {

std::vector<GridPoint> default_grid() {
  std::vector<GridPoint> grid;
  for (int d : {2, 4, 8, 12})
    for (int kq : {1, 2, 3})
      for (int kn : {1, 2, 3}) grid.push_back({d, kq, kn});
  return grid;
}

void CvPlan::validate() const {
  if (outer_folds < 2 || inner_folds < 2)
    throw std::invalid_argument("CvPlan: fold counts must be >= 2");
  if (mrmr_bins < 2) throw std::invalid_argument("CvPlan: mrmr_bins must be >= 2");
  for (const auto& gp : grid)
    if (gp.d < 1 || gp.k_qs < 1 || gp.k_nonqs < 1)
      throw std::invalid_argument("CvPlan: grid entries must be positive");
}

std::vector<int> split_by_patient(const Dataset& dataset, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw std::invalid_argument("split_by_patient: need at least 2 folds");
  std::vector<std::string> patients = dataset.patient_ids();
  if (static_cast<int>(patients.size()) < n_folds)
    throw std::invalid_argument("split_by_patient: " + std::to_string(patients.size()) +
                                " patients is fewer than " + std::to_string(n_folds) + " folds");
  Rng rng(seed);
  for (std::size_t i = patients.size(); i > 1; --i)  // Fisher-Yates
    std::swap(patients[i - 1], patients[rng.uniform_int(0, static_cast<int>(i) - 1)]);
  std::map<std::string, int> fold_of;
  for (std::size_t i = 0; i < patients.size(); ++i)
    fold_of[patients[i]] = static_cast<int>(i) % n_folds;
  std::vector<int> out;
  out.reserve(dataset.recordings.size());
  for (const auto& rec : dataset.recordings) out.push_back(fold_of.at(rec.patient_id));
  return out;
}

namespace {

Dataset subset(const Dataset& dataset, const std::vector<int>& folds, int fold, bool keep) {
  Dataset out;
  out.feature_names = dataset.feature_names;
  for (std::size_t i = 0; i < dataset.recordings.size(); ++i)
    if ((folds[i] == fold) == keep) out.recordings.push_back(dataset.recordings[i]);
  return out;
}

std::string describe(const GridPoint& gp) {
  return "(d=" + std::to_string(gp.d) + ", k_qs=" + std::to_string(gp.k_qs) +
         ", k_nonqs=" + std::to_string(gp.k_nonqs) + ")";
}

}  // namespace

GridSearchResult grid_search(const Dataset& training, const CvPlan& plan, const EmConfig& em) {
  plan.validate();
  if (plan.grid.empty()) throw std::invalid_argument("grid_search: empty grid");
  const int n_patients = static_cast<int>(training.patient_ids().size());
  GridSearchResult result;

  int folds = plan.inner_folds;
  if (n_patients < folds) {
    folds = n_patients - 1;
    if (folds < 2)
      throw std::invalid_argument("grid_search: " + std::to_string(n_patients) +
                                  " patients cannot support an inner CV");
    result.warnings.push_back("inner folds reduced from " + std::to_string(plan.inner_folds) +
                              " to " + std::to_string(folds) + " (" +
                              std::to_string(n_patients) + " patients in training split)");
  }

  int max_d = 0;
  for (const auto& gp : plan.grid) max_d = std::max(max_d, gp.d);

  const std::vector<int> assignment = split_by_patient(training, folds, plan.seed);
  const std::size_t n_grid = plan.grid.size();
  std::vector<std::vector<std::pair<int, int>>> pooled(n_grid);  // (true, pred) per grid point
  std::vector<bool> failed(n_grid, false);

  for (int f = 0; f < folds; ++f) {
    const Dataset inner_train = subset(training, assignment, f, false);
    const Dataset inner_test = subset(training, assignment, f, true);
    const FeatureRanking ranking =
        select(stacked_epochs(inner_train), augmented_labels(inner_train),
               {plan.mrmr_bins, max_d});
    for (std::size_t g = 0; g < n_grid; ++g) {
      if (failed[g]) continue;
      const GridPoint& gp = plan.grid[g];
      std::vector<int> selected(ranking.indices.begin(), ranking.indices.begin() + gp.d);
      try {
        const BnModel model =
            train(inner_train, gp.d, gp.k_qs, gp.k_nonqs, em, selected);
        for (const auto& rec : inner_test.recordings)
          pooled[g].push_back(
              {age_group_of(rec.pma_weeks).index, predict_age(model, rec).index});
      } catch (const std::exception& e) {
        failed[g] = true;
        result.warnings.push_back("grid point " + describe(gp) + " skipped: " + e.what());
      }
    }
  }

  bool found = false;
  for (std::size_t g = 0; g < n_grid; ++g) {
    if (failed[g]) continue;
    const AlphaResult alpha =
        krippendorff_alpha({pooled[g], kNumAgeGroups, Scale::Ordinal});
    const GridPoint& gp = plan.grid[g];
    const auto better = [&] {
      if (alpha.alpha != result.best_score) return alpha.alpha > result.best_score;
      if (gp.d != result.best.d) return gp.d < result.best.d;
      const int sum = gp.k_qs + gp.k_nonqs;
      const int best_sum = result.best.k_qs + result.best.k_nonqs;
      if (sum != best_sum) return sum < best_sum;
      return gp.k_qs < result.best.k_qs;
    };
    if (!found || better()) {
      result.best = gp;
      result.best_score = alpha.alpha;
      found = true;
    }
  }
  if (!found) {
    std::string detail = "grid_search: every grid point failed";
    for (const std::string& w : result.warnings) detail += "\n  " + w;
    throw std::runtime_error(detail);
  }
  return result;
}

CvReport run_cv(const Dataset& dataset, const CvPlan& plan, const EmConfig& em) {
  plan.validate();
  CvPlan effective = plan;
  if (effective.grid.empty()) effective.grid = default_grid();
  for (const auto& gp : effective.grid)
    if (gp.d > dataset.feature_count())
      throw std::invalid_argument("run_cv: grid d=" + std::to_string(gp.d) +
                                  " exceeds the raw feature count " +
                                  std::to_string(dataset.feature_count()));
  {
    const auto diagnostics = validate(dataset);
    if (!diagnostics.empty())
      throw std::invalid_argument("run_cv: dataset invalid: " + diagnostics.front().field +
                                  " of recording " + diagnostics.front().recording_id + ": " +
                                  diagnostics.front().message);
  }

  const std::vector<int> outer = split_by_patient(dataset, effective.outer_folds, effective.seed);
  CvReport report;
  std::vector<std::pair<std::size_t, RecordingOutcome>> rows;  // (dataset index, outcome)

  for (int f = 0; f < effective.outer_folds; ++f) {
    try {
      const Dataset train_split = subset(dataset, outer, f, false);
      const Dataset test_split = subset(dataset, outer, f, true);
      if (test_split.recordings.empty()) continue;

      CvPlan inner_plan = effective;
      inner_plan.seed = mix_seed(effective.seed, 1000 + static_cast<std::uint64_t>(f));
      const GridSearchResult gs = grid_search(train_split, inner_plan, em);
      for (const auto& w : gs.warnings)
        report.warnings.push_back("fold " + std::to_string(f) + ": " + w);
      report.fold_choices.push_back({f, gs.best, gs.best_score});

      const FeatureRanking ranking =
          select(stacked_epochs(train_split), augmented_labels(train_split),
                 {effective.mrmr_bins, gs.best.d});
      const BnModel model = train(train_split, gs.best.d, gs.best.k_qs,
                                              gs.best.k_nonqs, em, ranking.indices);

      for (std::size_t i = 0; i < dataset.recordings.size(); ++i) {
        if (outer[i] != f) continue;
        const Recording& rec = dataset.recordings[i];
        RecordingOutcome row;
        row.patient_id = rec.patient_id;
        row.recording_id = rec.recording_id;
        row.fold = f;
        row.true_group = age_group_of(rec.pma_weeks).index;
        const AgePosterior post = log_posterior(model, rec);
        row.predicted_group = post.map_age.index;
        row.posterior = post.probs;
        row.sleep_alpha = std::numeric_limits<double>::quiet_NaN();
        if (rec.sleep_labels && rec.epoch_count() >= 2) {
          const SleepPrediction sleep = predict_sleep(model, rec, post.map_age);
          std::vector<std::pair<int, int>> pairs;
          pairs.reserve(sleep.states.size());
          for (std::size_t e = 0; e < sleep.states.size(); ++e)
            pairs.push_back({static_cast<int>((*rec.sleep_labels)[e]),
                             static_cast<int>(sleep.states[e])});
          const AlphaResult a = krippendorff_alpha({pairs, kNumSleepStates, Scale::Nominal});
          row.sleep_alpha = a.alpha;
          row.sleep_alpha_degenerate = a.degenerate;
        }
        rows.push_back({i, std::move(row)});
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("run_cv: outer fold " + std::to_string(f) + " failed: " +
                               e.what());
    }
  }

  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<int> truth, predicted;
  for (auto& [idx, row] : rows) {
    truth.push_back(row.true_group);
    predicted.push_back(row.predicted_group);
    report.recordings.push_back(std::move(row));
  }
  report.confusion = confusion(truth, predicted, kNumAgeGroups);
  report.accuracy = report.confusion.accuracy();
  std::vector<std::pair<int, int>> age_pairs;
  for (std::size_t i = 0; i < truth.size(); ++i) age_pairs.push_back({truth[i], predicted[i]});
  report.alpha_ord = krippendorff_alpha({age_pairs, kNumAgeGroups, Scale::Ordinal});
  return report;
}

}  // namespace agenet
