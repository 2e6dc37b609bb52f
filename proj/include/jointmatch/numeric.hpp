#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace jm {

using Vec = std::vector<double>;

// Dense row-major matrix. All math in the engine is 64-bit; accumulation
// order is fixed (row-major, left to right) so runs are bit-reproducible.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

// A point on the C-class probability simplex: entries in [0,1], summing to 1
// within 1e-6, C >= 2.
struct ProbDist {
  Vec probs;

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }

  // Ties broken by lowest class index.
  std::size_t arg_max() const;
  double max_prob() const;

  // True iff the simplex invariants hold.
  bool valid() const;
};

// Hard class label; by construction the argmax of the distribution it came
// from (lowest index on ties).
struct HardLabel {
  std::size_t class_index = 0;

  bool operator==(const HardLabel&) const = default;
};

// Numerically stabilized softmax (max subtraction). Rejects non-finite
// logits and length < 2 with std::invalid_argument.
ProbDist softmax(const Vec& logits);

// -log(pred[target]); pred[target] clamped to >= 1e-12 before the log.
double cross_entropy(HardLabel target, const ProbDist& pred);

// Central-difference gradient estimate, one coordinate at a time. Used as
// the independent oracle for every analytic gradient in the engine.
Vec finite_diff_gradient(const std::function<double(const Vec&)>& f,
                         const Vec& theta, double eps = 1e-5);

// ||a - b|| / max(||a||, ||b||, floor); the relative-error measure used by
// the gradient checks.
double relative_error(const Vec& a, const Vec& b, double floor = 1e-10);

}  // namespace jm
