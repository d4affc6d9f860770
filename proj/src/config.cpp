#include "config.hpp"

#include <charconv>
#include <stdexcept>

#include "domain.hpp"

namespace agenet {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(const std::string& origin, int line, const std::string& key,
               const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last || value.empty()) {
    fail(origin, line, "key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

std::array<int, kNumAgeGroups> per_group_counts(const KeyValues& kv,
                                                const std::string& key,
                                                int fallback) {
  const std::vector<int> def{fallback};
  std::vector<int> got = kv.get_int_list(key, def);
  std::array<int, kNumAgeGroups> out{};
  if (got.size() == 1) {
    out.fill(got[0]);
  } else if (got.size() == kNumAgeGroups) {
    for (int g = 0; g < kNumAgeGroups; ++g) out[static_cast<std::size_t>(g)] = got[static_cast<std::size_t>(g)];
  } else {
    throw ParseError("key '" + key + "' needs 1 value or " +
                     std::to_string(kNumAgeGroups) + ", got " +
                     std::to_string(got.size()));
  }
  return out;
}

std::vector<GridPoint> build_grid(const KeyValues& kv) {
  const std::vector<int> ds = kv.get_int_list("grid_d", {2, 4, 8, 12});
  const std::vector<int> kqs = kv.get_int_list("grid_k_qs", {1, 2, 3});
  const std::vector<int> knq = kv.get_int_list("grid_k_nonqs", {1, 2, 3});
  std::vector<GridPoint> grid;
  for (int d : ds) {
    for (int a : kqs) {
      for (int b : knq) grid.push_back({d, a, b});
    }
  }
  return grid;
}

EmConfig build_em(const KeyValues& kv) {
  EmConfig em;
  em.max_iters = kv.get_int("em_max_iters", em.max_iters);
  em.tol = kv.get_double("em_tol", em.tol);
  em.reg_eps = kv.get_double("em_reg_eps", em.reg_eps);
  em.n_restarts = kv.get_int("em_restarts", em.n_restarts);
  em.seed = kv.get_u64("seed", em.seed);
  if (em.max_iters < 1) throw ParseError("em_max_iters must be >= 1");
  if (!(em.tol > 0.0)) throw ParseError("em_tol must be > 0");
  if (!(em.reg_eps > 0.0)) throw ParseError("em_reg_eps must be > 0");
  if (em.n_restarts < 1) throw ParseError("em_restarts must be >= 1");
  return em;
}

const std::set<std::string> kEmKeys = {"em_max_iters", "em_tol", "em_reg_eps",
                                       "em_restarts", "seed"};

std::set<std::string> with_em(std::set<std::string> keys) {
  keys.insert(kEmKeys.begin(), kEmKeys.end());
  return keys;
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text, const std::string& origin) {
  KeyValues kv;
  kv.origin_ = origin;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string line = end == std::string::npos ? text.substr(start)
                                                : text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (!line.empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        fail(origin, line_no, "expected 'key = value', got '" + line + "'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (!valid_key(key)) fail(origin, line_no, "bad key '" + key + "'");
      if (value.empty()) fail(origin, line_no, "key '" + key + "' has no value");
      kv.entries_[key] = Entry{value, line_no};
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return kv;
}

bool KeyValues::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValues::get_string(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.value;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  return parse_number<double>(origin_, it->second.line, key, it->second.value);
}

int KeyValues::get_int(const std::string& key, int fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  return parse_number<int>(origin_, it->second.line, key, it->second.value);
}

std::uint64_t KeyValues::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  return parse_number<std::uint64_t>(origin_, it->second.line, key, it->second.value);
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second.value;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(origin_, it->second.line, "key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<int> KeyValues::get_int_list(const std::string& key,
                                         const std::vector<int>& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<int> out;
  const std::string& v = it->second.value;
  std::size_t start = 0;
  while (start <= v.size()) {
    const std::size_t comma = v.find(',', start);
    const std::string piece =
        trim(comma == std::string::npos ? v.substr(start) : v.substr(start, comma - start));
    if (piece.empty()) {
      fail(origin_, it->second.line, "key '" + key + "': empty list element");
    }
    out.push_back(parse_number<int>(origin_, it->second.line, key, piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void KeyValues::check_keys(const std::set<std::string>& allowed) const {
  for (const auto& [key, entry] : entries_) {
    if (!allowed.count(key)) {
      fail(origin_, entry.line, "unknown key '" + key + "'");
    }
  }
}

TrainOptions parse_train_config(const std::string& text, const std::string& origin) {
  const KeyValues kv = KeyValues::parse(text, origin);
  kv.check_keys(with_em({"d", "k_qs", "k_nonqs", "mrmr_bins", "grid_search",
                         "inner_folds", "grid_d", "grid_k_qs", "grid_k_nonqs"}));
  TrainOptions opt;
  opt.d = kv.get_int("d", opt.d);
  opt.k_qs = kv.get_int("k_qs", opt.k_qs);
  opt.k_nonqs = kv.get_int("k_nonqs", opt.k_nonqs);
  opt.mrmr_bins = kv.get_int("mrmr_bins", opt.mrmr_bins);
  opt.grid_search = kv.get_bool("grid_search", opt.grid_search);
  opt.inner_folds = kv.get_int("inner_folds", opt.inner_folds);
  opt.grid = build_grid(kv);
  opt.em = build_em(kv);
  if (opt.d < 1) throw ParseError("d must be >= 1");
  if (opt.k_qs < 1 || opt.k_nonqs < 1) throw ParseError("k_qs and k_nonqs must be >= 1");
  if (opt.mrmr_bins < 2) throw ParseError("mrmr_bins must be >= 2");
  if (opt.inner_folds < 2) throw ParseError("inner_folds must be >= 2");
  for (const GridPoint& gp : opt.grid) {
    if (gp.d < 1 || gp.k_qs < 1 || gp.k_nonqs < 1) {
      throw ParseError("grid entries must be positive");
    }
  }
  return opt;
}

CvOptions parse_cv_config(const std::string& text, const std::string& origin) {
  const KeyValues kv = KeyValues::parse(text, origin);
  kv.check_keys(with_em({"outer_folds", "inner_folds", "mrmr_bins", "grid_d",
                         "grid_k_qs", "grid_k_nonqs"}));
  CvOptions opt;
  opt.plan.outer_folds = kv.get_int("outer_folds", opt.plan.outer_folds);
  opt.plan.inner_folds = kv.get_int("inner_folds", opt.plan.inner_folds);
  opt.plan.mrmr_bins = kv.get_int("mrmr_bins", opt.plan.mrmr_bins);
  opt.plan.grid = build_grid(kv);
  opt.em = build_em(kv);
  opt.plan.seed = opt.em.seed;
  try {
    opt.plan.validate();
  } catch (const std::exception& e) {
    throw ParseError(e.what());
  }
  return opt;
}

SynthOptions parse_synth_config(const std::string& text, const std::string& origin) {
  const KeyValues kv = KeyValues::parse(text, origin);
  kv.check_keys({"separation", "d", "k_qs", "k_nonqs", "model_file",
                 "noise_features", "recordings_per_group", "patients_per_group",
                 "epochs_min", "epochs_max", "seed"});
  SynthOptions opt;
  opt.separation = kv.get_double("separation", opt.separation);
  opt.d = kv.get_int("d", opt.d);
  opt.k_qs = kv.get_int("k_qs", opt.k_qs);
  opt.k_nonqs = kv.get_int("k_nonqs", opt.k_nonqs);
  opt.model_file = kv.get_string("model_file", opt.model_file);
  opt.spec.noise_features = kv.get_int("noise_features", 5);
  opt.spec.recordings_per_group = per_group_counts(kv, "recordings_per_group", 17);
  opt.spec.patients_per_group = per_group_counts(kv, "patients_per_group", 7);
  opt.spec.epochs_min = kv.get_int("epochs_min", 120);
  opt.spec.epochs_max = kv.get_int("epochs_max", 240);
  opt.spec.seed = kv.get_u64("seed", 0);
  if (opt.d < 1) throw ParseError("d must be >= 1");
  if (opt.k_qs < 1 || opt.k_nonqs < 1) throw ParseError("k_qs and k_nonqs must be >= 1");
  if (!(opt.separation > 0.0)) throw ParseError("separation must be > 0");
  return opt;
}

}  // namespace agenet
