#pragma once

#include <array>
#include <cstdint>

#include "bayes_net.hpp"
#include "domain.hpp"

namespace agenet {

// Generating truth plus dataset shape for ancestral sampling.
struct SynthSpec {
  BnModel model;
  std::array<int, kNumAgeGroups> recordings_per_group{};
  std::array<int, kNumAgeGroups> patients_per_group{};
  int epochs_min = 1;
  int epochs_max = 1;
  int noise_features = 0;  // pure-noise columns appended after the model's raw features
  std::uint64_t seed = 0;

  void validate() const;
};

// Samples a labeled dataset from the hierarchy: each recording draws a PMA
// uniformly inside its group's interval (group 0 as [27,30), group 5 as
// [38,42]), each epoch draws its state from Bernoulli(q_a) and its features
// from the (age,state) mixture. Model feature columns are written through
// the inverse standardization at the model's raw indices; every other raw
// column is i.i.d. standard normal noise. Bit-exactly reproducible from the
// seed; the seed space is partitioned per recording.
Dataset sample_dataset(const SynthSpec& spec);

// Test-fixture model: 12 unit-covariance GMMs whose age-group centers are
// `separation` apart along the first axis, with QS/non-QS centers split by
// ±0.3*separation along a second direction and fixed-scale component jitter.
// q_a is drawn in [0.2,0.5] (quiet sleep the minority state). Identity
// standardization, feature indices 0..d-1.
BnModel make_separable_model(double separation, int d, int k_qs, int k_nonqs,
                             std::uint64_t seed);

}  // namespace agenet
