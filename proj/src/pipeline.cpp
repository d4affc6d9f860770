#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "csv.hpp"
#include "metrics.hpp"
#include "model_io.hpp"
#include "rng.hpp"
#include "synth.hpp"

namespace agenet {
namespace {

using ordered_json = nlohmann::ordered_json;

// fixture-model stream, far outside the per-recording streams
constexpr std::uint64_t kFixtureModelStream = 1ULL << 40;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

ordered_json posterior_json(const std::array<double, kNumAgeGroups>& probs) {
  ordered_json arr = ordered_json::array();
  for (double p : probs) arr.push_back(p);
  return arr;
}

ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return ordered_json(v);
  return ordered_json(nullptr);
}

std::string states_string(const std::vector<SleepState>& states) {
  std::string out;
  out.reserve(states.size());
  for (SleepState s : states) out.push_back(s == SleepState::QS ? 'Q' : 'N');
  return out;
}

}  // namespace

void require_valid(const Dataset& dataset, const std::string& origin) {
  const std::vector<Diagnostic> problems = validate(dataset);
  if (problems.empty()) return;
  std::ostringstream out;
  out << origin << ": dataset failed validation (" << problems.size() << " finding"
      << (problems.size() == 1 ? "" : "s") << ")";
  for (const Diagnostic& d : problems) {
    out << "\n  ";
    if (!d.recording_id.empty()) out << d.recording_id << ": ";
    out << d.field << ": " << d.message;
  }
  throw ParseError(out.str());
}

TrainOutcome run_train(const Dataset& dataset, const TrainOptions& options) {
  require_valid(dataset, "training data");
  TrainOutcome out;

  const Eigen::MatrixXd stacked = stacked_epochs(dataset);
  const std::vector<int> labels = augmented_labels(dataset);

  int d = options.d;
  int k_qs = options.k_qs;
  int k_nonqs = options.k_nonqs;

  if (options.grid_search) {
    CvPlan plan;
    plan.inner_folds = options.inner_folds;
    plan.grid = options.grid;
    plan.mrmr_bins = options.mrmr_bins;
    plan.seed = options.em.seed;
    const GridSearchResult gs = grid_search(dataset, plan, options.em);
    out.warnings.insert(out.warnings.end(), gs.warnings.begin(), gs.warnings.end());
    d = gs.best.d;
    k_qs = gs.best.k_qs;
    k_nonqs = gs.best.k_nonqs;
    out.warnings.push_back("grid search chose d=" + std::to_string(d) +
                           " k_qs=" + std::to_string(k_qs) +
                           " k_nonqs=" + std::to_string(k_nonqs) +
                           " (inner ordinal alpha " + fmt("%.4f", gs.best_score) + ")");
  }

  MrmrConfig mrmr;
  mrmr.n_bins = options.mrmr_bins;
  mrmr.max_features = d;
  out.ranking = select(stacked, labels, mrmr);

  out.model = train(dataset, d, k_qs, k_nonqs, options.em, out.ranking.indices,
                    &out.diagnostics);
  return out;
}

std::vector<PredictionRow> run_predict(const BnModel& model, const Dataset& dataset) {
  require_valid(dataset, "prediction data");
  std::vector<PredictionRow> rows;
  rows.reserve(dataset.recordings.size());
  for (const Recording& rec : dataset.recordings) {
    PredictionRow row;
    row.patient_id = rec.patient_id;
    row.recording_id = rec.recording_id;
    row.pma_weeks = rec.pma_weeks;
    row.true_group = age_group_of(rec.pma_weeks).index;
    row.posterior = log_posterior(model, rec);
    row.sleep = predict_sleep(model, rec, row.posterior.map_age);
    rows.push_back(std::move(row));
  }
  return rows;
}

Dataset run_synth(const SynthOptions& options) {
  SynthSpec spec = options.spec;
  if (!options.model_file.empty()) {
    spec.model = load_model(options.model_file);
  } else {
    spec.model = make_separable_model(options.separation, options.d, options.k_qs,
                                      options.k_nonqs,
                                      mix_seed(spec.seed, kFixtureModelStream));
  }
  return sample_dataset(spec);
}

std::string train_summary(const Dataset& dataset, const TrainOptions& options,
                          const TrainOutcome& outcome) {
  std::ostringstream out;
  out << "trained on " << dataset.recordings.size() << " recordings, "
      << dataset.patient_ids().size() << " patients, " << dataset.total_epochs()
      << " epochs, " << dataset.feature_count() << " raw features\n";
  out << "parameters: d=" << outcome.model.dim()
      << " k_qs=" << outcome.model.settings.k_qs
      << " k_nonqs=" << outcome.model.settings.k_nonqs
      << " restarts=" << options.em.n_restarts << " seed=" << options.em.seed << "\n";
  out << "selected features:";
  for (std::size_t i = 0; i < outcome.ranking.indices.size(); ++i) {
    const int f = outcome.ranking.indices[i];
    out << ' ' << f << ':' << dataset.feature_names[static_cast<std::size_t>(f)];
  }
  out << "\ncells (epochs, final log-likelihood, converged):\n";
  for (int a = 0; a < kNumAgeGroups; ++a) {
    for (int s = 0; s < kNumSleepStates; ++s) {
      char line[128];
      std::snprintf(line, sizeof(line), "  %-6s %-5s %8lld  %14.4f  %s\n",
                    AgeGroup{a}.label().c_str(),
                    to_string(static_cast<SleepState>(s)),
                    outcome.diagnostics.cell_epochs[a][s],
                    outcome.diagnostics.cell_log_likelihood[a][s],
                    outcome.diagnostics.cell_converged[a][s] ? "yes" : "no");
      out << line;
    }
  }
  out << "qs_prob:";
  for (int a = 0; a < kNumAgeGroups; ++a) {
    out << ' ' << AgeGroup{a}.label() << '=' << fmt("%.4f", outcome.model.qs_prob[a]);
  }
  out << '\n';
  for (const std::string& w : outcome.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string prediction_report_text(const BnModel& model,
                                   const std::vector<PredictionRow>& rows) {
  ordered_json j;
  j["format"] = "agenet-predictions";
  j["version"] = 1;
  j["model_dim"] = static_cast<long long>(model.dim());
  ordered_json recs = ordered_json::array();
  for (const PredictionRow& row : rows) {
    ordered_json r;
    r["patient_id"] = row.patient_id;
    r["recording_id"] = row.recording_id;
    r["pma_weeks"] = row.pma_weeks;
    r["true_group"] = row.true_group;
    r["true_group_label"] = AgeGroup{row.true_group}.label();
    r["predicted_group"] = row.posterior.map_age.index;
    r["predicted_group_label"] = row.posterior.map_age.label();
    ordered_json scores = ordered_json::array();
    for (double v : row.posterior.log_scores) scores.push_back(v);
    r["log_scores"] = std::move(scores);
    r["posterior"] = posterior_json(row.posterior.probs);
    const std::size_t n = row.sleep.states.size();
    std::size_t qs = 0;
    for (SleepState s : row.sleep.states)
      if (s == SleepState::QS) ++qs;
    r["epochs"] = n;
    r["qs_fraction"] = n == 0 ? 0.0 : static_cast<double>(qs) / static_cast<double>(n);
    r["sleep_states"] = states_string(row.sleep.states);
    ordered_json qs_post = ordered_json::array();
    for (double p : row.sleep.qs_posterior) qs_post.push_back(p);
    r["qs_posterior"] = std::move(qs_post);
    recs.push_back(std::move(r));
  }
  j["recordings"] = std::move(recs);
  return j.dump(2) + "\n";
}

std::string prediction_summary(const std::vector<PredictionRow>& rows) {
  const std::size_t n = rows.size();
  std::size_t exact = 0, within_one = 0;
  double qs_sum = 0.0;
  for (const PredictionRow& row : rows) {
    const int diff = std::abs(row.posterior.map_age.index - row.true_group);
    if (diff == 0) ++exact;
    if (diff <= 1) ++within_one;
    const std::size_t epochs = row.sleep.states.size();
    std::size_t qs = 0;
    for (SleepState s : row.sleep.states)
      if (s == SleepState::QS) ++qs;
    if (epochs > 0) qs_sum += static_cast<double>(qs) / static_cast<double>(epochs);
  }
  std::ostringstream out;
  out << "predicted " << n << " recordings: age-group accuracy "
      << fmt("%.4f", n ? static_cast<double>(exact) / static_cast<double>(n) : 0.0)
      << " (" << exact << "/" << n << "), within one group "
      << fmt("%.4f", n ? static_cast<double>(within_one) / static_cast<double>(n) : 0.0)
      << ", mean decoded QS fraction "
      << fmt("%.4f", n ? qs_sum / static_cast<double>(n) : 0.0) << '\n';
  return out.str();
}

std::string cv_report_text(const CvReport& report) {
  ordered_json j;
  j["format"] = "agenet-cv";
  j["version"] = 1;
  j["accuracy"] = report.accuracy;
  j["alpha_ordinal"] = report.alpha_ord.alpha;
  j["alpha_ordinal_degenerate"] = report.alpha_ord.degenerate;
  j["alpha_ordinal_band"] = interpret_alpha(report.alpha_ord.alpha);
  ordered_json conf = ordered_json::array();
  for (Eigen::Index i = 0; i < report.confusion.counts.rows(); ++i) {
    ordered_json rowj = ordered_json::array();
    for (Eigen::Index k = 0; k < report.confusion.counts.cols(); ++k) {
      rowj.push_back(report.confusion.counts(i, k));
    }
    conf.push_back(std::move(rowj));
  }
  j["confusion"] = std::move(conf);
  ordered_json folds = ordered_json::array();
  for (const FoldChoice& fc : report.fold_choices) {
    folds.push_back({{"fold", fc.fold},
                     {"d", fc.params.d},
                     {"k_qs", fc.params.k_qs},
                     {"k_nonqs", fc.params.k_nonqs},
                     {"inner_score", fc.inner_score}});
  }
  j["fold_choices"] = std::move(folds);
  ordered_json recs = ordered_json::array();
  for (const RecordingOutcome& r : report.recordings) {
    ordered_json e;
    e["patient_id"] = r.patient_id;
    e["recording_id"] = r.recording_id;
    e["fold"] = r.fold;
    e["true_group"] = r.true_group;
    e["predicted_group"] = r.predicted_group;
    e["posterior"] = posterior_json(r.posterior);
    e["sleep_alpha"] = finite_or_null(r.sleep_alpha);
    e["sleep_alpha_degenerate"] = r.sleep_alpha_degenerate;
    recs.push_back(std::move(e));
  }
  j["recordings"] = std::move(recs);
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string cv_summary(const CvReport& report) {
  std::ostringstream out;
  long long correct = 0;
  for (Eigen::Index i = 0; i < report.confusion.counts.rows(); ++i) {
    correct += report.confusion.counts(i, i);
  }
  out << report.fold_choices.size() << "-fold patient-stratified CV over "
      << report.recordings.size() << " recordings\n";
  out << "age-group accuracy " << fmt("%.4f", report.accuracy) << " (" << correct << "/"
      << report.confusion.total() << "), ordinal alpha "
      << fmt("%.4f", report.alpha_ord.alpha) << " ("
      << interpret_alpha(report.alpha_ord.alpha) << ")";
  if (report.alpha_ord.degenerate) out << " [degenerate]";
  out << '\n';
  for (const FoldChoice& fc : report.fold_choices) {
    out << "  fold " << fc.fold << ": d=" << fc.params.d << " k_qs=" << fc.params.k_qs
        << " k_nonqs=" << fc.params.k_nonqs << " (inner alpha "
        << fmt("%.4f", fc.inner_score) << ")\n";
  }
  for (const std::string& w : report.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string synth_summary(const Dataset& dataset) {
  std::size_t labeled = 0;
  for (const Recording& rec : dataset.recordings)
    if (rec.sleep_labels) ++labeled;
  std::ostringstream out;
  out << "sampled " << dataset.recordings.size() << " recordings ("
      << dataset.patient_ids().size() << " patients), " << dataset.total_epochs()
      << " epochs, " << dataset.feature_count() << " features, " << labeled << "/"
      << dataset.recordings.size() << " recordings labeled\n";
  return out.str();
}

}  // namespace agenet
