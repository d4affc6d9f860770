#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "evaluation.hpp"
#include "synth.hpp"

namespace agenet {

// Flat "key = value" text. '#' starts a comment, blank lines are skipped,
// and when a key repeats the last occurrence wins (that is how --seed
// overrides a seed given in a config file).
class KeyValues {
 public:
  static KeyValues parse(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback) const;

  // Rejects keys outside `allowed` so typos fail loudly instead of being
  // silently ignored.
  void check_keys(const std::set<std::string>& allowed) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string origin_;
  std::map<std::string, Entry> entries_;
};

struct TrainOptions {
  int d = 4;
  int k_qs = 2;
  int k_nonqs = 2;
  int mrmr_bins = 10;
  bool grid_search = false;
  int inner_folds = 18;
  std::vector<GridPoint> grid;  // used when grid_search is on
  EmConfig em;
};

struct CvOptions {
  CvPlan plan;
  EmConfig em;
};

struct SynthOptions {
  SynthSpec spec;
  std::string model_file;  // when set, sample from this model instead
  double separation = 6.0;
  int d = 3;
  int k_qs = 1;
  int k_nonqs = 1;
};

TrainOptions parse_train_config(const std::string& text, const std::string& origin);
CvOptions parse_cv_config(const std::string& text, const std::string& origin);
SynthOptions parse_synth_config(const std::string& text, const std::string& origin);

}  // namespace agenet
