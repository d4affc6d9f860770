#include "model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "csv.hpp"

namespace agenet {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::VectorXd vector_from(const ordered_json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError(what + ": expected numbers");
    v(i++) = e.get<double>();
  }
  return v;
}

Eigen::MatrixXd matrix_from(const ordered_json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ParseError(what + ": expected a non-empty array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index i = 0;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(what + ": ragged matrix");
    Eigen::Index k = 0;
    for (const auto& e : row) {
      if (!e.is_number()) throw ParseError(what + ": expected numbers");
      m(i, k++) = e.get<double>();
    }
    ++i;
  }
  return m;
}

const ordered_json& expect(const ordered_json& j, const std::string& key,
                           const std::string& origin) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(origin + ": missing key '" + key + "'");
  return *it;
}

}  // namespace

std::string model_to_text(const BnModel& model) {
  ordered_json j;
  j["format"] = "agenet-model";
  j["version"] = kModelFormatVersion;
  j["raw_feature_count"] = static_cast<long long>(model.raw_feature_count);
  j["feature_indices"] = model.feature_indices;
  j["standardization"] = {{"shift", vector_json(model.standardization.shift)},
                          {"scale", vector_json(model.standardization.scale)}};
  j["age_log_prior"] = model.age_log_prior;
  j["qs_prob"] = model.qs_prob;
  j["training"] = {{"k_qs", model.settings.k_qs},
                   {"k_nonqs", model.settings.k_nonqs},
                   {"em_max_iters", model.settings.em.max_iters},
                   {"em_tol", model.settings.em.tol},
                   {"em_reg_eps", model.settings.em.reg_eps},
                   {"em_restarts", model.settings.em.n_restarts},
                   {"seed", model.settings.em.seed}};
  ordered_json cells = ordered_json::array();
  for (int a = 0; a < kNumAgeGroups; ++a) {
    for (int s = 0; s < kNumSleepStates; ++s) {
      const GmmParams& g = model.gmms[a][s];
      ordered_json cell;
      cell["age_group"] = a;
      cell["state"] = to_string(static_cast<SleepState>(s));
      cell["weights"] = g.weights;
      ordered_json means = ordered_json::array();
      for (const auto& mu : g.means) means.push_back(vector_json(mu));
      cell["means"] = std::move(means);
      ordered_json covs = ordered_json::array();
      for (const auto& c : g.covariances) covs.push_back(matrix_json(c));
      cell["covariances"] = std::move(covs);
      cells.push_back(std::move(cell));
    }
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

BnModel model_from_text(const std::string& text, const std::string& origin) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(origin + ": expected a JSON object");
  if (expect(j, "format", origin) != "agenet-model")
    throw ParseError(origin + ": not an agenet model file");
  const int version = expect(j, "version", origin).get<int>();
  if (version != kModelFormatVersion)
    throw ParseError(origin + ": unsupported model version " + std::to_string(version));

  BnModel model;
  model.raw_feature_count =
      static_cast<Eigen::Index>(expect(j, "raw_feature_count", origin).get<long long>());
  model.feature_indices = expect(j, "feature_indices", origin).get<std::vector<int>>();
  const ordered_json& st = expect(j, "standardization", origin);
  model.standardization.shift = vector_from(expect(st, "shift", origin), origin + ": shift");
  model.standardization.scale = vector_from(expect(st, "scale", origin), origin + ": scale");

  const auto prior = expect(j, "age_log_prior", origin).get<std::vector<double>>();
  const auto qs = expect(j, "qs_prob", origin).get<std::vector<double>>();
  if (prior.size() != kNumAgeGroups || qs.size() != kNumAgeGroups)
    throw ParseError(origin + ": age_log_prior and qs_prob need " +
                     std::to_string(kNumAgeGroups) + " entries");
  for (int a = 0; a < kNumAgeGroups; ++a) {
    model.age_log_prior[a] = prior[static_cast<std::size_t>(a)];
    model.qs_prob[a] = qs[static_cast<std::size_t>(a)];
  }

  const ordered_json& tr = expect(j, "training", origin);
  model.settings.k_qs = expect(tr, "k_qs", origin).get<int>();
  model.settings.k_nonqs = expect(tr, "k_nonqs", origin).get<int>();
  model.settings.em.max_iters = expect(tr, "em_max_iters", origin).get<int>();
  model.settings.em.tol = expect(tr, "em_tol", origin).get<double>();
  model.settings.em.reg_eps = expect(tr, "em_reg_eps", origin).get<double>();
  model.settings.em.n_restarts = expect(tr, "em_restarts", origin).get<int>();
  model.settings.em.seed = expect(tr, "seed", origin).get<std::uint64_t>();

  const ordered_json& cells = expect(j, "cells", origin);
  if (!cells.is_array() || cells.size() != kNumAgeGroups * kNumSleepStates)
    throw ParseError(origin + ": expected " +
                     std::to_string(kNumAgeGroups * kNumSleepStates) + " cells");
  std::array<std::array<bool, kNumSleepStates>, kNumAgeGroups> seen{};
  for (const auto& cell : cells) {
    const int a = expect(cell, "age_group", origin).get<int>();
    const std::string state = expect(cell, "state", origin).get<std::string>();
    if (a < 0 || a >= kNumAgeGroups)
      throw ParseError(origin + ": age_group " + std::to_string(a) + " out of range");
    int s;
    if (state == "QS") {
      s = 0;
    } else if (state == "NONQS") {
      s = 1;
    } else {
      throw ParseError(origin + ": bad state '" + state + "'");
    }
    if (seen[a][s]) throw ParseError(origin + ": duplicate cell");
    seen[a][s] = true;
    GmmParams& g = model.gmms[a][s];
    g.weights = expect(cell, "weights", origin).get<std::vector<double>>();
    for (const auto& mu : expect(cell, "means", origin))
      g.means.push_back(vector_from(mu, origin + ": mean"));
    for (const auto& c : expect(cell, "covariances", origin))
      g.covariances.push_back(matrix_from(c, origin + ": covariance"));
    if (g.means.size() != g.weights.size() || g.covariances.size() != g.weights.size())
      throw ParseError(origin + ": cell arrays disagree on component count");
  }

  try {
    model.validate();
  } catch (const std::exception& e) {
    throw ParseError(origin + ": invalid model: " + e.what());
  }
  return model;
}

void save_model(const BnModel& model, const std::string& path) {
  write_text_atomic(path, model_to_text(model));
}

BnModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_text(buf.str(), path);
}

}  // namespace agenet
