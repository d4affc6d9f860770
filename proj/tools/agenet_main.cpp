#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "agenet.h"

namespace {

constexpr const char* kTrainKeys =
    "config keys (defaults): d (4), k_qs (2), k_nonqs (2), mrmr_bins (10), seed (0), "
    "em_max_iters (200), em_tol (1e-6), em_reg_eps (1e-6), em_restarts (3), "
    "grid_search (false), inner_folds (18), grid_d (2,4,8,12), grid_k_qs (1,2,3), "
    "grid_k_nonqs (1,2,3)";

constexpr const char* kCvKeys =
    "config keys (defaults): outer_folds (10), inner_folds (18), mrmr_bins (10), "
    "seed (0), grid_d (2,4,8,12), grid_k_qs (1,2,3), grid_k_nonqs (1,2,3), "
    "em_max_iters (200), em_tol (1e-6), em_reg_eps (1e-6), em_restarts (3)";

constexpr const char* kSynthKeys =
    "config keys (defaults): separation (6), d (3), k_qs (1), k_nonqs (1), "
    "model_file (none), noise_features (5), recordings_per_group (17), "
    "patients_per_group (7), epochs_min (120), epochs_max (240), seed (0)";

int fail_usage(const std::string& message) {
  std::cerr << "error: " << message << '\n';
  return 1;
}

int finish(agenet_status status) {
  if (status != AGENET_OK) std::cerr << "error: " << agenet_last_error() << '\n';
  return static_cast<int>(status);
}

void print_owned(char* text) {
  if (!text) return;
  std::cout << text;
  agenet_string_free(text);
}

// Missing --config means defaults. A --seed flag overrides any seed in the
// file because later keys win.
bool assemble_config(const std::string& config_path, bool seed_set, std::uint64_t seed,
                     std::string& out_text, std::string& error) {
  out_text.clear();
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      error = config_path + ": cannot open for reading";
      return false;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    out_text = buf.str();
  }
  if (seed_set) {
    out_text += "\nseed = " + std::to_string(seed) + "\n";
  }
  return true;
}

struct DatasetGuard {
  agenet_dataset* ptr = nullptr;
  ~DatasetGuard() { agenet_dataset_free(ptr); }
};

struct ModelGuard {
  agenet_model* ptr = nullptr;
  ~ModelGuard() { agenet_model_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"age-dependent Bayesian network over per-epoch EEG features"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("agenet ") + agenet_version());

  std::string data_path, model_path, config_path, out_path;
  std::uint64_t seed = 0;

  auto* train = app.add_subcommand(
      "train", std::string("fit the network on a labeled epoch CSV\n") + kTrainKeys);
  train->add_option("--data", data_path, "labeled epoch CSV")->required();
  train->add_option("--out", out_path, "model file to write")->required();
  train->add_option("--config", config_path, "key = value options file");
  auto* train_seed = train->add_option("--seed", seed, "overrides seed from --config");

  auto* predict = app.add_subcommand(
      "predict", "age posterior and sleep decoding for every recording");
  predict->add_option("--model", model_path, "model file from train")->required();
  predict->add_option("--data", data_path, "epoch CSV to score")->required();
  predict->add_option("--out", out_path, "JSON report to write")->required();

  auto* cv = app.add_subcommand(
      "cv", std::string("nested patient-stratified cross-validation\n") + kCvKeys);
  cv->add_option("--data", data_path, "labeled epoch CSV")->required();
  cv->add_option("--out", out_path, "JSON report to write")->required();
  cv->add_option("--config", config_path, "key = value plan file");
  auto* cv_seed = cv->add_option("--seed", seed, "overrides seed from --config");

  auto* synth = app.add_subcommand(
      "synth", std::string("sample a synthetic labeled dataset\n") + kSynthKeys);
  synth->add_option("--out", out_path, "epoch CSV to write")->required();
  synth->add_option("--config", config_path, "key = value spec file");
  auto* synth_seed = synth->add_option("--seed", seed, "overrides seed from --config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string config_text, error;

  if (train->parsed()) {
    if (!assemble_config(config_path, !train_seed->empty(), seed, config_text, error)) {
      return fail_usage(error);
    }
    DatasetGuard data;
    agenet_status rc = agenet_dataset_read_csv(data_path.c_str(), &data.ptr);
    if (rc != AGENET_OK) return finish(rc);
    ModelGuard model;
    char* summary = nullptr;
    rc = agenet_train(data.ptr, config_text.c_str(), &model.ptr, &summary);
    if (rc != AGENET_OK) return finish(rc);
    rc = agenet_model_save(model.ptr, out_path.c_str());
    if (rc != AGENET_OK) {
      agenet_string_free(summary);
      return finish(rc);
    }
    print_owned(summary);
    std::cout << "model written to " << out_path << '\n';
    return 0;
  }

  if (predict->parsed()) {
    ModelGuard model;
    agenet_status rc = agenet_model_load(model_path.c_str(), &model.ptr);
    if (rc != AGENET_OK) return finish(rc);
    DatasetGuard data;
    rc = agenet_dataset_read_csv(data_path.c_str(), &data.ptr);
    if (rc != AGENET_OK) return finish(rc);
    char* summary = nullptr;
    rc = agenet_predict(model.ptr, data.ptr, out_path.c_str(), &summary);
    if (rc != AGENET_OK) return finish(rc);
    print_owned(summary);
    std::cout << "report written to " << out_path << '\n';
    return 0;
  }

  if (cv->parsed()) {
    if (!assemble_config(config_path, !cv_seed->empty(), seed, config_text, error)) {
      return fail_usage(error);
    }
    DatasetGuard data;
    agenet_status rc = agenet_dataset_read_csv(data_path.c_str(), &data.ptr);
    if (rc != AGENET_OK) return finish(rc);
    char* summary = nullptr;
    rc = agenet_cross_validate(data.ptr, config_text.c_str(), out_path.c_str(), &summary);
    if (rc != AGENET_OK) return finish(rc);
    print_owned(summary);
    std::cout << "report written to " << out_path << '\n';
    return 0;
  }

  if (synth->parsed()) {
    if (!assemble_config(config_path, !synth_seed->empty(), seed, config_text, error)) {
      return fail_usage(error);
    }
    char* summary = nullptr;
    const agenet_status rc = agenet_synth(config_text.c_str(), out_path.c_str(), &summary);
    if (rc != AGENET_OK) return finish(rc);
    print_owned(summary);
    std::cout << "dataset written to " << out_path << '\n';
    return 0;
  }

  return fail_usage("no subcommand");
}
