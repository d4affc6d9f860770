#include "domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace agenet {

const char* to_string(SleepState s) { return s == SleepState::QS ? "QS" : "NONQS"; }

std::string AgeGroup::label() const {
  switch (index) {
    case 0: return "<30";
    case 1: return "30-31";
    case 2: return "32-33";
    case 3: return "34-35";
    case 4: return "36-37";
    default: return ">=38";
  }
}

AgeGroup age_group_of(double pma_weeks) {
  if (!std::isfinite(pma_weeks) || pma_weeks <= 0.0)
    throw std::invalid_argument("age_group_of: pma_weeks must be positive and finite, got " +
                                std::to_string(pma_weeks));
  int g = 0;
  while (g < kNumAgeGroups - 1 && pma_weeks >= kAgeGroupEdges[g]) ++g;
  return AgeGroup{g};
}

int augment(AgeGroup age, SleepState state) {
  return age.index * kNumSleepStates + static_cast<int>(state);
}

std::pair<AgeGroup, SleepState> split_augmented(int code) {
  if (code < 0 || code >= kNumAugmentedLabels)
    throw std::invalid_argument("split_augmented: code out of range: " + std::to_string(code));
  return {AgeGroup{code / kNumSleepStates}, static_cast<SleepState>(code % kNumSleepStates)};
}

std::size_t Dataset::total_epochs() const {
  std::size_t n = 0;
  for (const auto& r : recordings) n += static_cast<std::size_t>(r.epoch_count());
  return n;
}

std::vector<std::string> Dataset::patient_ids() const {
  std::set<std::string> ids;
  for (const auto& r : recordings) ids.insert(r.patient_id);
  return {ids.begin(), ids.end()};
}

std::vector<Diagnostic> validate(const Dataset& dataset) {
  std::vector<Diagnostic> out;
  const auto m = dataset.feature_count();
  for (const auto& rec : dataset.recordings) {
    const std::string& id = rec.recording_id;
    if (rec.epoch_count() == 0) {
      out.push_back({id, "epochs", "recording has no epochs"});
      continue;
    }
    if (rec.raw_dim() != m)
      out.push_back({id, "epochs",
                     "feature dimension " + std::to_string(rec.raw_dim()) +
                         " does not match dataset feature count " + std::to_string(m)});
    if (!std::isfinite(rec.pma_weeks) || rec.pma_weeks <= 0.0)
      out.push_back({id, "pma_weeks", "pma_weeks must be positive and finite"});
    if (rec.sleep_labels && static_cast<Eigen::Index>(rec.sleep_labels->size()) != rec.epoch_count())
      out.push_back({id, "sleep_labels",
                     "label count " + std::to_string(rec.sleep_labels->size()) +
                         " does not match epoch count " + std::to_string(rec.epoch_count())});
    for (Eigen::Index i = 0; i < rec.epoch_count(); ++i) {
      if (!rec.epochs.row(i).allFinite()) {
        out.push_back({id, "epochs", "non-finite feature value in epoch " + std::to_string(i)});
        break;  // one diagnostic per recording is enough to locate the problem
      }
    }
  }
  std::set<std::string> rec_ids;
  for (const auto& rec : dataset.recordings) {
    if (!rec_ids.insert(rec.patient_id + "/" + rec.recording_id).second)
      out.push_back({rec.recording_id, "recording_id", "duplicate (patient_id, recording_id)"});
  }
  return out;
}

}  // namespace agenet
