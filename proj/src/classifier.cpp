#include "jointmatch/classifier.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace jm {

namespace {

double apply_activation(Activation a, double z) {
  return a == Activation::Tanh ? std::tanh(z) : z;
}

// Derivative expressed through the activated value h = act(z).
double activation_grad(Activation a, double h) {
  return a == Activation::Tanh ? 1.0 - h * h : 1.0;
}

}  // namespace

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) {
  return a == Activation::Tanh ? "tanh" : "identity";
}

void Gradients::scale(double s) {
  for (auto& w : weights) {
    for (auto& v : w.a) v *= s;
  }
  for (auto& b : biases) {
    for (auto& v : b) v *= s;
  }
}

void Gradients::add_scaled(const Gradients& other, double s) {
  if (other.weights.size() != weights.size()) {
    throw std::invalid_argument("Gradients::add_scaled: layer count mismatch");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (other.weights[l].a.size() != weights[l].a.size() ||
        other.biases[l].size() != biases[l].size()) {
      throw std::invalid_argument("Gradients::add_scaled: shape mismatch");
    }
    for (std::size_t i = 0; i < weights[l].a.size(); ++i) {
      weights[l].a[i] += s * other.weights[l].a[i];
    }
    for (std::size_t i = 0; i < biases[l].size(); ++i) {
      biases[l][i] += s * other.biases[l][i];
    }
  }
}

Classifier::Classifier(const std::vector<std::size_t>& layer_sizes,
                       Activation act, SeededRng rng, std::string model_id)
    : layer_sizes_(layer_sizes),
      activation_(act),
      model_id_(std::move(model_id)) {
  if (layer_sizes_.size() < 2) {
    throw std::invalid_argument("Classifier: need at least [d_in, C]");
  }
  if (layer_sizes_.front() < 1) {
    throw std::invalid_argument("Classifier: d_in must be >= 1");
  }
  if (layer_sizes_.back() < 2) {
    throw std::invalid_argument("Classifier: C must be >= 2");
  }
  for (std::size_t s : layer_sizes_) {
    if (s == 0) throw std::invalid_argument("Classifier: zero layer size");
  }
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    std::size_t fan_in = layer_sizes_[l];
    std::size_t fan_out = layer_sizes_[l + 1];
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Mat w(fan_out, fan_in);
    for (auto& v : w.a) v = rng.uniform(-bound, bound);
    Vec b(fan_out, 0.0);
    for (auto& v : b) v = rng.uniform(-bound, bound);
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
}

Vec Classifier::logits(const Vec& x) const {
  if (x.size() != input_dim()) {
    throw std::invalid_argument("Classifier::logits: dimension mismatch");
  }
  Vec h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Mat& w = weights_[l];
    Vec z(w.rows, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
      double acc = biases_[l][r];
      for (std::size_t c = 0; c < w.cols; ++c) acc += w.at(r, c) * h[c];
      z[r] = acc;
    }
    if (l + 1 < weights_.size()) {
      for (double& v : z) v = apply_activation(activation_, v);
    }
    h = std::move(z);
  }
  return h;
}

ProbDist Classifier::forward(const Vec& x) const { return softmax(logits(x)); }

Gradients Classifier::zero_gradients() const {
  Gradients g;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    g.weights.emplace_back(weights_[l].rows, weights_[l].cols);
    g.biases.emplace_back(biases_[l].size(), 0.0);
  }
  return g;
}

Classifier::BackwardResult Classifier::backward(const std::vector<Vec>& xs,
                                                const std::vector<HardLabel>& ys,
                                                const Vec& weights,
                                                std::size_t normalizer) const {
  if (xs.empty()) {
    throw std::invalid_argument("Classifier::backward: empty batch");
  }
  if (xs.size() != ys.size() || xs.size() != weights.size()) {
    throw std::invalid_argument("Classifier::backward: batch size mismatch");
  }
  for (double w : weights) {
    if (w < 0.0) {
      throw std::invalid_argument("Classifier::backward: negative weight");
    }
  }
  if (normalizer == 0) normalizer = xs.size();
  const double inv_n = 1.0 / static_cast<double>(normalizer);
  const std::size_t L = weights_.size();

  BackwardResult result;
  result.grads = zero_gradients();
  double loss_acc = 0.0;

  std::vector<Vec> activations(L + 1);
  for (std::size_t b = 0; b < xs.size(); ++b) {
    const double w_b = weights[b];
    if (w_b == 0.0) continue;
    if (ys[b].class_index >= num_classes()) {
      throw std::invalid_argument("Classifier::backward: target out of range");
    }

    // Forward pass, keeping each layer's activated output.
    activations[0] = xs[b];
    for (std::size_t l = 0; l < L; ++l) {
      const Mat& wm = weights_[l];
      Vec z(wm.rows, 0.0);
      for (std::size_t r = 0; r < wm.rows; ++r) {
        double acc = biases_[l][r];
        for (std::size_t c = 0; c < wm.cols; ++c) {
          acc += wm.at(r, c) * activations[l][c];
        }
        z[r] = acc;
      }
      if (l + 1 < L) {
        for (double& v : z) v = apply_activation(activation_, v);
      }
      activations[l + 1] = std::move(z);
    }

    ProbDist p = softmax(activations[L]);
    loss_acc += w_b * cross_entropy(ys[b], p);

    // Softmax + cross-entropy head: dz = (w_b / n) * (p - onehot).
    const double scale = w_b * inv_n;
    Vec dz(num_classes());
    for (std::size_t i = 0; i < num_classes(); ++i) {
      dz[i] = scale * (p[i] - (i == ys[b].class_index ? 1.0 : 0.0));
    }

    for (std::size_t l = L; l-- > 0;) {
      Mat& gw = result.grads.weights[l];
      Vec& gb = result.grads.biases[l];
      const Vec& in = activations[l];
      for (std::size_t r = 0; r < gw.rows; ++r) {
        gb[r] += dz[r];
        for (std::size_t c = 0; c < gw.cols; ++c) {
          gw.at(r, c) += dz[r] * in[c];
        }
      }
      if (l == 0) break;
      const Mat& wm = weights_[l];
      Vec dh(wm.cols, 0.0);
      for (std::size_t c = 0; c < wm.cols; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < wm.rows; ++r) acc += wm.at(r, c) * dz[r];
        acc *= activation_grad(activation_, in[c]);
        dh[c] = acc;
      }
      dz = std::move(dh);
    }
  }

  result.loss = loss_acc * inv_n;
  return result;
}

Vec Classifier::flatten_parameters() const {
  Vec flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    flat.insert(flat.end(), weights_[l].a.begin(), weights_[l].a.end());
    flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
  }
  return flat;
}

void Classifier::set_parameters(const Vec& flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("Classifier::set_parameters: size mismatch");
  }
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (auto& v : weights_[l].a) v = flat[k++];
    for (auto& v : biases_[l]) v = flat[k++];
  }
}

std::size_t Classifier::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += weights_[l].a.size() + biases_[l].size();
  }
  return n;
}

std::string Classifier::to_checkpoint_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["model_id"] = model_id_;
  j["layer_sizes"] = layer_sizes_;
  j["activation"] = to_string(activation_);
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    nlohmann::json layer;
    layer["weights"] = weights_[l].a;  // row-major
    layer["bias"] = biases_[l];
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

Classifier Classifier::from_checkpoint_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("checkpoint parse error: ") +
                                e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1) {
    throw std::invalid_argument("checkpoint: unsupported schema_version");
  }
  Classifier model;
  model.layer_sizes_ = j.at("layer_sizes").get<std::vector<std::size_t>>();
  model.activation_ = activation_from_string(j.at("activation").get<std::string>());
  model.model_id_ = j.value("model_id", std::string());
  if (model.layer_sizes_.size() < 2) {
    throw std::invalid_argument("checkpoint: bad layer_sizes");
  }
  const auto& layers = j.at("layers");
  if (layers.size() + 1 != model.layer_sizes_.size()) {
    throw std::invalid_argument("checkpoint: layer count mismatch");
  }
  for (std::size_t l = 0; l + 1 < model.layer_sizes_.size(); ++l) {
    Mat w(model.layer_sizes_[l + 1], model.layer_sizes_[l]);
    Vec flat = layers[l].at("weights").get<Vec>();
    if (flat.size() != w.a.size()) {
      throw std::invalid_argument("checkpoint: weight size mismatch");
    }
    w.a = std::move(flat);
    Vec b = layers[l].at("bias").get<Vec>();
    if (b.size() != w.rows) {
      throw std::invalid_argument("checkpoint: bias size mismatch");
    }
    model.weights_.push_back(std::move(w));
    model.biases_.push_back(std::move(b));
  }
  return model;
}

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "gd" || s == "sgd") return OptimizerKind::GradientDescent;
  throw std::invalid_argument("unknown optimizer: " + s);
}

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::Adam ? "adam" : "gd";
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate)
    : kind_(kind), lr_(learning_rate) {
  if (!(learning_rate >= 0.0)) {
    throw std::invalid_argument("Optimizer: learning rate must be >= 0");
  }
}

void Optimizer::step(Classifier& model, const Gradients& grads) {
  if (grads.weights.size() != model.weights_.size()) {
    throw std::invalid_argument("Optimizer::step: layer count mismatch");
  }
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    if (grads.weights[l].rows != model.weights_[l].rows ||
        grads.weights[l].cols != model.weights_[l].cols ||
        grads.biases[l].size() != model.biases_[l].size()) {
      throw std::invalid_argument("Optimizer::step: gradient shape mismatch");
    }
  }

  if (kind_ == OptimizerKind::GradientDescent) {
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
      for (std::size_t i = 0; i < model.weights_[l].a.size(); ++i) {
        model.weights_[l].a[i] -= lr_ * grads.weights[l].a[i];
      }
      for (std::size_t i = 0; i < model.biases_[l].size(); ++i) {
        model.biases_[l][i] -= lr_ * grads.biases[l][i];
      }
    }
    return;
  }

  if (m_w_.empty()) {
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
      m_w_.emplace_back(grads.weights[l].rows, grads.weights[l].cols);
      v_w_.emplace_back(grads.weights[l].rows, grads.weights[l].cols);
      m_b_.emplace_back(grads.biases[l].size(), 0.0);
      v_b_.emplace_back(grads.biases[l].size(), 0.0);
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto adam_update = [&](double& theta, double g, double& m, double& v) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g * g;
    theta -= lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps_);
  };
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    for (std::size_t i = 0; i < model.weights_[l].a.size(); ++i) {
      adam_update(model.weights_[l].a[i], grads.weights[l].a[i],
                  m_w_[l].a[i], v_w_[l].a[i]);
    }
    for (std::size_t i = 0; i < model.biases_[l].size(); ++i) {
      adam_update(model.biases_[l][i], grads.biases[l][i], m_b_[l][i],
                  v_b_[l][i]);
    }
  }
}

}  // namespace jm
