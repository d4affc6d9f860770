#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace agenet {

// Derive an independent stream seed from a master seed (splitmix64 step).
// Used to partition the seed space across EM restarts, (age,state) cells,
// CV folds, and synthetic recordings so each consumer is deterministic on
// its own.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Seeded generator with hand-rolled draws. The standard <random>
// distributions are implementation-defined, so everything that must be
// reproducible bit-exactly from a seed goes through these instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0,1)
  double uniform();
  // uniform in [lo,hi)
  double uniform(double lo, double hi);
  // integer in [lo,hi] inclusive
  int uniform_int(int lo, int hi);
  // standard normal via Box-Muller (no cached second value)
  double normal();
  // index drawn proportional to the given nonnegative weights
  std::size_t categorical(const std::vector<double>& weights);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace agenet
