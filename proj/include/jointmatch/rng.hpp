#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace jm {

// Deterministic, portable random stream. The engine is std::mt19937_64, whose
// output sequence is fixed by the standard; all distributions are implemented
// here by hand because the <random> distribution adaptors are
// implementation-defined and would break cross-platform reproducibility.
//
// Stream splitting: derive(k) produces an independent child stream from the
// construction seed (not from consumed state), so sibling streams never
// interfere and a consumer can derive per-purpose streams:
//
//   SeededRng(seed_data).derive(1)  -> labeled batch sampling
//   SeededRng(seed_data).derive(2)  -> unlabeled batch sampling
//   SeededRng(seed_aug).derive(t).derive(channel).derive(i)
//                                   -> augmentation of example i, step t
//
// Instances are not shareable across threads; each consumer owns its stream.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed)
      : seed_(seed), engine_(mix_(seed)) {}

  // Independent child stream keyed on (construction seed, stream id).
  SeededRng derive(std::uint64_t stream) const {
    return SeededRng(mix_(seed_ ^ mix_(stream + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two draws.
  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform integer in [0, n); n must be > 0.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  // splitmix64 finalizer; used both to whiten seeds and to mix stream ids.
  static std::uint64_t mix_(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace jm
