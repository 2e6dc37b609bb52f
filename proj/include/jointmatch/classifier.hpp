#pragma once

#include <string>
#include <vector>

#include "jointmatch/numeric.hpp"
#include "jointmatch/rng.hpp"

namespace jm {

enum class Activation { Identity, Tanh };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

struct Gradients {
  std::vector<Mat> weights;
  std::vector<Vec> biases;

  void scale(double s);
  void add_scaled(const Gradients& other, double s);
};

// Small feed-forward softmax classifier with explicit parameter storage and
// manual backpropagation. Stands in for the two co-trained networks; layer
// sizes are [d_in, hidden..., C] with the given activation on hidden layers
// and a softmax head.
class Classifier {
 public:
  // Parameters drawn uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)],
  // deterministic in the rng stream.
  Classifier(const std::vector<std::size_t>& layer_sizes, Activation act,
             SeededRng rng, std::string model_id = "");

  const std::string& model_id() const { return model_id_; }
  std::size_t input_dim() const { return layer_sizes_.front(); }
  std::size_t num_classes() const { return layer_sizes_.back(); }
  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  Activation activation() const { return activation_; }
  std::size_t num_layers() const { return weights_.size(); }

  Vec logits(const Vec& x) const;
  ProbDist forward(const Vec& x) const;

  // Gradients of (1/normalizer) * sum_b w_b * H(y_b, forward(x_b)) plus the
  // loss value itself. normalizer = 0 means "use batch size". Samples with
  // weight exactly 0 are skipped, so they contribute exactly zero loss and
  // zero gradient.
  struct BackwardResult {
    Gradients grads;
    double loss = 0.0;
  };
  BackwardResult backward(const std::vector<Vec>& xs,
                          const std::vector<HardLabel>& ys,
                          const Vec& weights, std::size_t normalizer = 0) const;

  Gradients zero_gradients() const;

  // Flat parameter view (layer by layer: W row-major, then b). Used by the
  // finite-difference oracle and the checkpoint format.
  Vec flatten_parameters() const;
  void set_parameters(const Vec& flat);
  std::size_t parameter_count() const;

  // Versioned JSON checkpoint (layer sizes header + row-major arrays).
  std::string to_checkpoint_json() const;
  static Classifier from_checkpoint_json(const std::string& text);

  const std::vector<Mat>& weight_matrices() const { return weights_; }
  const std::vector<Vec>& bias_vectors() const { return biases_; }

  friend class Optimizer;

 private:
  Classifier() = default;

  std::vector<std::size_t> layer_sizes_;
  Activation activation_ = Activation::Tanh;
  std::string model_id_;
  std::vector<Mat> weights_;
  std::vector<Vec> biases_;
};

enum class OptimizerKind { GradientDescent, Adam };

OptimizerKind optimizer_from_string(const std::string& s);
std::string to_string(OptimizerKind k);

// Plain gradient descent (theta -= lr * g, exactly) or adaptive-moment
// updates. A zero gradient leaves parameters unchanged in both modes.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }

  void step(Classifier& model, const Gradients& grads);

 private:
  OptimizerKind kind_;
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::size_t t_ = 0;
  std::vector<Mat> m_w_, v_w_;
  std::vector<Vec> m_b_, v_b_;
};

}  // namespace jm
