#include "agenet.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>

#include "config.hpp"
#include "csv.hpp"
#include "domain.hpp"
#include "evaluation.hpp"
#include "model_io.hpp"
#include "pipeline.hpp"

struct agenet_dataset {
  agenet::Dataset ds;
};

struct agenet_model {
  agenet::BnModel model;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename F>
agenet_status guarded(F&& body) {
  try {
    return body();
  } catch (const agenet::ParseError& e) {
    set_error(e.what());
    return AGENET_ERR_PARSE;
  } catch (const std::exception& e) {
    set_error(e.what());
    return AGENET_ERR_COMPUTE;
  } catch (...) {
    set_error("unknown error");
    return AGENET_ERR_COMPUTE;
  }
}

agenet_status null_arg(const char* what) {
  set_error(std::string(what) + " must not be NULL");
  return AGENET_ERR_PARSE;
}

std::string text_or_empty(const char* text) { return text ? std::string(text) : std::string(); }

}  // namespace

extern "C" {

const char* agenet_version(void) { return "0.1.0"; }

const char* agenet_last_error(void) { return g_last_error.c_str(); }

void agenet_string_free(char* s) { std::free(s); }

agenet_status agenet_dataset_read_csv(const char* path, agenet_dataset** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto* handle = new agenet_dataset{agenet::read_epoch_csv(path)};
    *out = handle;
    return AGENET_OK;
  });
}

agenet_status agenet_dataset_write_csv(const agenet_dataset* dataset, const char* path) {
  if (!dataset) return null_arg("dataset");
  if (!path) return null_arg("path");
  return guarded([&] {
    agenet::write_epoch_csv(dataset->ds, path);
    return AGENET_OK;
  });
}

void agenet_dataset_free(agenet_dataset* dataset) { delete dataset; }

agenet_status agenet_dataset_validate(const agenet_dataset* dataset, char** report) {
  if (!dataset) return null_arg("dataset");
  if (!report) return null_arg("report");
  return guarded([&] {
    const std::vector<agenet::Diagnostic> problems = agenet::validate(dataset->ds);
    if (problems.empty()) {
      *report = nullptr;
      return AGENET_OK;
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i > 0) out << '\n';
      if (!problems[i].recording_id.empty()) out << problems[i].recording_id << ": ";
      out << problems[i].field << ": " << problems[i].message;
    }
    *report = dup_string(out.str());
    set_error("dataset failed validation");
    return AGENET_ERR_COMPUTE;
  });
}

agenet_status agenet_dataset_counts(const agenet_dataset* dataset, int64_t* recordings,
                                    int64_t* patients, int64_t* epochs,
                                    int64_t* features) {
  if (!dataset) return null_arg("dataset");
  return guarded([&] {
    if (recordings) *recordings = static_cast<int64_t>(dataset->ds.recordings.size());
    if (patients) *patients = static_cast<int64_t>(dataset->ds.patient_ids().size());
    if (epochs) *epochs = static_cast<int64_t>(dataset->ds.total_epochs());
    if (features) *features = static_cast<int64_t>(dataset->ds.feature_count());
    return AGENET_OK;
  });
}

agenet_status agenet_train(const agenet_dataset* data, const char* config_text,
                           agenet_model** out_model, char** summary) {
  if (!data) return null_arg("data");
  if (!out_model) return null_arg("out_model");
  return guarded([&] {
    const agenet::TrainOptions options =
        agenet::parse_train_config(text_or_empty(config_text), "config");
    agenet::TrainOutcome outcome = agenet::run_train(data->ds, options);
    if (summary) *summary = dup_string(agenet::train_summary(data->ds, options, outcome));
    *out_model = new agenet_model{std::move(outcome.model)};
    return AGENET_OK;
  });
}

agenet_status agenet_model_save(const agenet_model* model, const char* path) {
  if (!model) return null_arg("model");
  if (!path) return null_arg("path");
  return guarded([&] {
    agenet::save_model(model->model, path);
    return AGENET_OK;
  });
}

agenet_status agenet_model_load(const char* path, agenet_model** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new agenet_model{agenet::load_model(path)};
    return AGENET_OK;
  });
}

void agenet_model_free(agenet_model* model) { delete model; }

int agenet_model_dim(const agenet_model* model) {
  return model ? static_cast<int>(model->model.dim()) : 0;
}

agenet_status agenet_predict(const agenet_model* model, const agenet_dataset* data,
                             const char* report_path, char** summary) {
  if (!model) return null_arg("model");
  if (!data) return null_arg("data");
  return guarded([&] {
    const std::vector<agenet::PredictionRow> rows =
        agenet::run_predict(model->model, data->ds);
    if (report_path) {
      agenet::write_text_atomic(report_path,
                                agenet::prediction_report_text(model->model, rows));
    }
    if (summary) *summary = dup_string(agenet::prediction_summary(rows));
    return AGENET_OK;
  });
}

agenet_status agenet_predict_recording(const agenet_model* model,
                                       const agenet_dataset* data, int64_t index,
                                       double posterior[AGENET_NUM_AGE_GROUPS],
                                       int* map_group) {
  if (!model) return null_arg("model");
  if (!data) return null_arg("data");
  return guarded([&] {
    if (index < 0 || index >= static_cast<int64_t>(data->ds.recordings.size())) {
      set_error("recording index " + std::to_string(index) + " out of range");
      return AGENET_ERR_PARSE;
    }
    const agenet::AgePosterior post = agenet::log_posterior(
        model->model, data->ds.recordings[static_cast<std::size_t>(index)]);
    if (posterior) {
      for (int a = 0; a < AGENET_NUM_AGE_GROUPS; ++a) posterior[a] = post.probs[a];
    }
    if (map_group) *map_group = post.map_age.index;
    return AGENET_OK;
  });
}

agenet_status agenet_cross_validate(const agenet_dataset* data, const char* config_text,
                                    const char* report_path, char** summary) {
  if (!data) return null_arg("data");
  return guarded([&] {
    const agenet::CvOptions options =
        agenet::parse_cv_config(text_or_empty(config_text), "config");
    const agenet::CvReport report = agenet::run_cv(data->ds, options.plan, options.em);
    if (report_path) {
      agenet::write_text_atomic(report_path, agenet::cv_report_text(report));
    }
    if (summary) *summary = dup_string(agenet::cv_summary(report));
    return AGENET_OK;
  });
}

agenet_status agenet_synth(const char* config_text, const char* out_csv, char** summary) {
  if (!out_csv) return null_arg("out_csv");
  return guarded([&] {
    const agenet::SynthOptions options =
        agenet::parse_synth_config(text_or_empty(config_text), "config");
    const agenet::Dataset ds = agenet::run_synth(options);
    agenet::write_epoch_csv(ds, out_csv);
    if (summary) *summary = dup_string(agenet::synth_summary(ds));
    return AGENET_OK;
  });
}

}  // extern "C"
