#pragma once

#include <Eigen/Dense>
#include <compare>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace agenet {

inline constexpr int kNumAgeGroups = 6;
inline constexpr int kNumSleepStates = 2;
inline constexpr int kNumAugmentedLabels = kNumAgeGroups * kNumSleepStates;

// PMA-week boundaries between consecutive age groups. Intervals are
// half-open, lower-inclusive: group 0 = (-inf,30), group 1 = [30,32), ...,
// group 5 = [38,+inf).
inline constexpr double kAgeGroupEdges[kNumAgeGroups - 1] = {30.0, 32.0, 34.0, 36.0, 38.0};

enum class SleepState : int { QS = 0, NonQS = 1 };

const char* to_string(SleepState s);

// One of the six postmenstrual-age bins a recording can fall into.
struct AgeGroup {
  int index = 0;  // 0..5, totally ordered

  double lower() const {
    return index == 0 ? -std::numeric_limits<double>::infinity() : kAgeGroupEdges[index - 1];
  }
  double upper() const {
    return index == kNumAgeGroups - 1 ? std::numeric_limits<double>::infinity()
                                      : kAgeGroupEdges[index];
  }
  std::string label() const;  // e.g. "<30", "30-31", ..., ">=38"

  auto operator<=>(const AgeGroup&) const = default;
};

// Total on positive finite week values; throws std::invalid_argument otherwise.
AgeGroup age_group_of(double pma_weeks);

// (age, state) -> 0..11, code = age.index*2 + state index. Bijective.
int augment(AgeGroup age, SleepState state);
std::pair<AgeGroup, SleepState> split_augmented(int code);

// Ordered epoch sequence of one EEG recording. Rows of `epochs` are the
// per-epoch feature vectors in raw (unselected, unstandardized) feature space.
struct Recording {
  std::string patient_id;
  std::string recording_id;
  double pma_weeks = 0.0;
  Eigen::MatrixXd epochs;  // n_epochs x n_raw_features
  std::optional<std::vector<SleepState>> sleep_labels;

  Eigen::Index epoch_count() const { return epochs.rows(); }
  Eigen::Index raw_dim() const { return epochs.cols(); }
};

struct Dataset {
  std::vector<Recording> recordings;
  std::vector<std::string> feature_names;

  Eigen::Index feature_count() const { return static_cast<Eigen::Index>(feature_names.size()); }
  std::size_t total_epochs() const;
  std::vector<std::string> patient_ids() const;  // distinct, sorted
};

// A single validation finding. `recording_id` is empty for dataset-level
// findings.
struct Diagnostic {
  std::string recording_id;
  std::string field;
  std::string message;
};

// Checks every type invariant; returns one diagnostic per violation instead
// of throwing so callers can report everything at once.
std::vector<Diagnostic> validate(const Dataset& dataset);

// Thrown by file/config parsers; the C API maps it to the parse-error status
// (everything else maps to the compute-error status).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace agenet
