#include "jointmatch/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace jm {

std::size_t ProbDist::arg_max() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

double ProbDist::max_prob() const { return probs[arg_max()]; }

bool ProbDist::valid() const {
  if (probs.size() < 2) return false;
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= 1e-6;
}

ProbDist softmax(const Vec& logits) {
  if (logits.size() < 2) {
    throw std::invalid_argument("softmax: need at least 2 logits");
  }
  for (double v : logits) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("softmax: non-finite logit");
    }
  }
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  ProbDist out;
  out.probs.resize(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.probs[i] = std::exp(logits[i] - mx);
    sum += out.probs[i];
  }
  for (double& p : out.probs) p /= sum;
  return out;
}

double cross_entropy(HardLabel target, const ProbDist& pred) {
  if (target.class_index >= pred.size()) {
    throw std::invalid_argument("cross_entropy: target class out of range");
  }
  double p = pred[target.class_index];
  if (p < 1e-12) p = 1e-12;
  return -std::log(p);
}

Vec finite_diff_gradient(const std::function<double(const Vec&)>& f,
                         const Vec& theta, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("finite_diff_gradient: eps must be > 0");
  }
  Vec grad(theta.size(), 0.0);
  Vec probe = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + eps;
    double up = f(probe);
    probe[i] = theta[i] - eps;
    double down = f(probe);
    probe[i] = theta[i];
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

double relative_error(const Vec& a, const Vec& b, double floor) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("relative_error: size mismatch");
  }
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  double denom = std::max(std::max(std::sqrt(na), std::sqrt(nb)), floor);
  return std::sqrt(diff) / denom;
}

}  // namespace jm
