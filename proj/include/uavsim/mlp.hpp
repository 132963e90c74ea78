#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "uavsim/random.hpp"

namespace uavsim::nn {

using Matrix = Eigen::MatrixXd;  // features x batch, one sample per column
using Vector = Eigen::VectorXd;

enum class OutputActivation { kIdentity, kTanh };

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

// Dense feed-forward network: ReLU hidden layers, configurable output.
class Mlp {
 public:
  Mlp() = default;
  // Zero-initialised parameters.
  explicit Mlp(std::vector<int> dims, OutputActivation output = OutputActivation::kIdentity);

  // Weights uniform in +-1/sqrt(fan_in), zero biases.
  static Mlp init(std::vector<int> dims, Rng& rng, OutputActivation output = OutputActivation::kIdentity);

  const std::vector<int>& dims() const { return dims_; }
  int input_size() const { return dims_.front(); }
  int output_size() const { return dims_.back(); }
  OutputActivation output_activation() const { return output_; }
  std::size_t num_parameters() const;

  const std::vector<Layer>& layers() const { return layers_; }
  // Mutable access invalidates outstanding forward caches.
  std::vector<Layer>& mutable_layers() {
    ++version_;
    return layers_;
  }
  std::uint64_t version() const { return version_; }

  bool same_shape(const Mlp& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<Layer> layers_;
  OutputActivation output_ = OutputActivation::kIdentity;
  std::uint64_t version_ = 0;
};

struct ForwardCache {
  std::vector<Matrix> activations;  // [0] = input, back() = output
  const Mlp* net = nullptr;
  std::uint64_t version = 0;
};

struct Gradients {
  std::vector<Layer> layers;
};

struct BackwardResult {
  Gradients params;    // empty when parameter gradients were not requested
  Matrix input_grad;   // d(sum of output_grad . output) / d input
};

class StaleCache : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NonFiniteGradient : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

Matrix forward(const Mlp& net, const Matrix& input, ForwardCache* cache = nullptr);
Vector forward(const Mlp& net, const Vector& input);

// Reverse-mode pass for the cached forward. output_grad has the output's
// shape; gradients are sums over the batch columns.
BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Matrix& output_grad,
                        bool param_grads = true);

Gradients zero_gradients(const Mlp& net);

struct AdamState {
  std::vector<Layer> m;
  std::vector<Layer> v;
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_net(const Mlp& net);
};

// One bias-corrected Adam descent step. Throws NonFiniteGradient (leaving
// net and state untouched) if any gradient entry is not finite.
void adam_step(Mlp& net, AdamState& state, const Gradients& grads, double lr);

// target <- (1 - beta) * target + beta * online
void soft_update(Mlp& target, const Mlp& online, double beta);

struct LrSchedule {
  double initial = 0.1;
  double decay = 1e-3;
};

// Inverse-time decay: initial / (1 + decay * epoch).
double lr_at(const LrSchedule& schedule, long epoch);

// Text checkpoint: `mlp d0 ... dk`, then per layer a `W` line (row-major) and
// a `b` line, 17 significant digits.
void write_checkpoint(std::ostream& out, const Mlp& net);
Mlp read_checkpoint(std::istream& in, OutputActivation output = OutputActivation::kIdentity);

}  // namespace uavsim::nn
