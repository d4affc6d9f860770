#include "synth.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rng.hpp"

namespace agenet {

namespace {

// PMA sampling intervals; the unbounded outer groups are clipped to the
// 27-42 week span the cohort covers
std::pair<double, double> pma_interval(int group) {
  const double lo = group == 0 ? 27.0 : kAgeGroupEdges[group - 1];
  const double hi = group == kNumAgeGroups - 1 ? 42.0 : kAgeGroupEdges[group];
  return {lo, hi};
}

std::string padded(const char* prefix, int group, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%d_%02d", prefix, group, i);
  return buf;
}

}  // namespace

void SynthSpec::validate() const {
  // structural model checks only: a generating truth may use boundary
  // qs_prob values (e.g. always-QS), which trained models never carry
  const Eigen::Index d = model.dim();
  if (d == 0) throw std::invalid_argument("SynthSpec: model has no selected features");
  for (int a = 0; a < kNumAgeGroups; ++a) {
    for (int s = 0; s < kNumSleepStates; ++s) {
      model.gmms[a][s].validate();
      if (model.gmms[a][s].dim() != d)
        throw std::invalid_argument("SynthSpec: GMM dimension mismatch");
    }
    if (!(model.qs_prob[a] >= 0.0 && model.qs_prob[a] <= 1.0))
      throw std::invalid_argument("SynthSpec: qs_prob outside [0,1]");
  }
  if (model.standardization.shift.size() != d || model.standardization.scale.size() != d)
    throw std::invalid_argument("SynthSpec: standardization dimension mismatch");
  if ((model.standardization.scale.array() <= 0.0).any())
    throw std::invalid_argument("SynthSpec: non-positive standardization scale");
  for (int f : model.feature_indices)
    if (f < 0 || f >= model.raw_feature_count)
      throw std::invalid_argument("SynthSpec: feature index outside raw feature count");
  int total = 0;
  for (int g = 0; g < kNumAgeGroups; ++g) {
    if (recordings_per_group[g] < 0)
      throw std::invalid_argument("SynthSpec: negative recording count");
    if (recordings_per_group[g] > 0 && patients_per_group[g] < 1)
      throw std::invalid_argument("SynthSpec: group " + AgeGroup{g}.label() +
                                  " has recordings but no patients");
    total += recordings_per_group[g];
  }
  if (total == 0) throw std::invalid_argument("SynthSpec: no recordings requested");
  if (epochs_min < 1 || epochs_max < epochs_min)
    throw std::invalid_argument("SynthSpec: bad epochs range");
  if (noise_features < 0) throw std::invalid_argument("SynthSpec: negative noise_features");
}

Dataset sample_dataset(const SynthSpec& spec) {
  spec.validate();
  const Eigen::Index d = spec.model.dim();
  const Eigen::Index raw = spec.model.raw_feature_count + spec.noise_features;

  // cache component Cholesky factors of every cell once
  std::array<std::array<std::vector<Eigen::MatrixXd>, kNumSleepStates>, kNumAgeGroups> chol;
  for (int a = 0; a < kNumAgeGroups; ++a)
    for (int s = 0; s < kNumSleepStates; ++s)
      for (const auto& cov : spec.model.gmms[a][s].covariances)
        chol[a][s].push_back(Eigen::LLT<Eigen::MatrixXd>(cov).matrixL());

  Dataset ds;
  for (Eigen::Index f = 0; f < raw; ++f) ds.feature_names.push_back("f_" + std::to_string(f));

  std::uint64_t rec_ordinal = 0;
  for (int g = 0; g < kNumAgeGroups; ++g) {
    const auto [pma_lo, pma_hi] = pma_interval(g);
    for (int j = 0; j < spec.recordings_per_group[g]; ++j, ++rec_ordinal) {
      Rng rng(mix_seed(spec.seed, rec_ordinal));
      Recording rec;
      rec.patient_id = padded("p", g, j % spec.patients_per_group[g]);
      rec.recording_id = padded("r", g, j);
      rec.pma_weeks = rng.uniform(pma_lo, pma_hi);
      const int n = rng.uniform_int(spec.epochs_min, spec.epochs_max);
      rec.epochs.resize(n, raw);
      std::vector<SleepState> labels;
      labels.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const int s = rng.uniform() < spec.model.qs_prob[g] ? 0 : 1;
        labels.push_back(static_cast<SleepState>(s));
        const auto& gmm = spec.model.gmms[g][s];
        const std::size_t comp = rng.categorical(gmm.weights);
        Eigen::VectorXd z(d);
        for (Eigen::Index c = 0; c < d; ++c) z(c) = rng.normal();
        const Eigen::VectorXd x = gmm.means[comp] + chol[g][s][comp] * z;
        const Eigen::MatrixXd raw_x =
            spec.model.standardization.invert(x.transpose());
        // model features land at their raw indices; the rest is pure noise
        Eigen::RowVectorXd row(raw);
        std::vector<bool> filled(static_cast<std::size_t>(raw), false);
        for (Eigen::Index c = 0; c < d; ++c) {
          row(spec.model.feature_indices[static_cast<std::size_t>(c)]) = raw_x(0, c);
          filled[static_cast<std::size_t>(spec.model.feature_indices[static_cast<std::size_t>(c)])] =
              true;
        }
        for (Eigen::Index c = 0; c < raw; ++c)
          if (!filled[static_cast<std::size_t>(c)]) row(c) = rng.normal();
        rec.epochs.row(i) = row;
      }
      rec.sleep_labels = std::move(labels);
      ds.recordings.push_back(std::move(rec));
    }
  }
  return ds;
}

BnModel make_separable_model(double separation, int d, int k_qs, int k_nonqs,
                             std::uint64_t seed) {
  if (!(separation > 0.0)) throw std::invalid_argument("make_separable_model: separation <= 0");
  if (d < 1) throw std::invalid_argument("make_separable_model: d must be positive");
  if (k_qs < 1 || k_nonqs < 1)
    throw std::invalid_argument("make_separable_model: component counts must be positive");

  Rng rng(seed);
  BnModel model;
  model.feature_indices.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) model.feature_indices[static_cast<std::size_t>(j)] = j;
  model.raw_feature_count = d;
  model.standardization.shift = Eigen::VectorXd::Zero(d);
  model.standardization.scale = Eigen::VectorXd::Ones(d);
  model.settings = {k_qs, k_nonqs, EmConfig{}};

  Eigen::VectorXd age_dir = Eigen::VectorXd::Zero(d);
  age_dir(0) = 1.0;
  Eigen::VectorXd state_dir = Eigen::VectorXd::Zero(d);
  state_dir(d > 1 ? 1 : 0) = 1.0;

  for (int a = 0; a < kNumAgeGroups; ++a) {
    const Eigen::VectorXd center = separation * a * age_dir;
    for (int s = 0; s < kNumSleepStates; ++s) {
      const int k = s == 0 ? k_qs : k_nonqs;
      const Eigen::VectorXd base =
          center + (s == 0 ? 0.3 : -0.3) * separation * state_dir;
      GmmParams& gmm = model.gmms[a][s];
      double wsum = 0.0;
      for (int j = 0; j < k; ++j) {
        Eigen::VectorXd jitter(d);
        for (int c = 0; c < d; ++c) jitter(c) = rng.uniform(-0.5, 0.5);
        gmm.means.push_back(base + jitter);
        gmm.covariances.push_back(Eigen::MatrixXd::Identity(d, d));
        gmm.weights.push_back(rng.uniform(0.5, 1.5));
        wsum += gmm.weights.back();
      }
      for (double& w : gmm.weights) w /= wsum;
    }
    model.qs_prob[a] = rng.uniform(0.2, 0.5);
    model.age_log_prior[a] = -std::log(static_cast<double>(kNumAgeGroups));
  }
  return model;
}

}  // namespace agenet
