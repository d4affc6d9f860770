#pragma once

#include <string>
#include <vector>

#include "bayes_net.hpp"
#include "config.hpp"
#include "domain.hpp"
#include "evaluation.hpp"
#include "feature_selection.hpp"

namespace agenet {

struct TrainOutcome {
  BnModel model;
  FeatureRanking ranking;     // mRMR order over raw features (length >= model dim)
  TrainDiagnostics diagnostics;
  std::vector<std::string> warnings;
};

// Full training pipeline on a labeled dataset: dataset validation, mRMR
// ranking, optional inner-CV grid search for (d, k_qs, k_nonqs), final fit.
TrainOutcome run_train(const Dataset& dataset, const TrainOptions& options);

struct PredictionRow {
  std::string patient_id;
  std::string recording_id;
  double pma_weeks = 0.0;
  int true_group = 0;
  AgePosterior posterior;
  SleepPrediction sleep;
};

// Per-recording age posterior + MAP group + per-epoch sleep decoding.
std::vector<PredictionRow> run_predict(const BnModel& model, const Dataset& dataset);

// Synthetic sampling per the parsed options: from a model file when given,
// otherwise from the built-in separable fixture.
Dataset run_synth(const SynthOptions& options);

// Report bodies (JSON) and one-paragraph console summaries.
std::string train_summary(const Dataset& dataset, const TrainOptions& options,
                          const TrainOutcome& outcome);
std::string prediction_report_text(const BnModel& model,
                                   const std::vector<PredictionRow>& rows);
std::string prediction_summary(const std::vector<PredictionRow>& rows);
std::string cv_report_text(const CvReport& report);
std::string cv_summary(const CvReport& report);
std::string synth_summary(const Dataset& dataset);

// Throws ParseError listing every diagnostic when validation fails.
void require_valid(const Dataset& dataset, const std::string& origin);

}  // namespace agenet
