#include "uavsim/mlp.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace uavsim::nn {
namespace {

void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
}

void apply_output(Matrix& z, OutputActivation act) {
  if (act == OutputActivation::kTanh) z = z.array().tanh().matrix();
}

}  // namespace

Mlp::Mlp(std::vector<int> dims, OutputActivation output) : dims_(std::move(dims)), output_(output) {
  check_dims(dims_);
  for (std::size_t l = 1; l < dims_.size(); ++l)
    layers_.push_back({Matrix::Zero(dims_[l], dims_[l - 1]), Vector::Zero(dims_[l])});
}

Mlp Mlp::init(std::vector<int> dims, Rng& rng, OutputActivation output) {
  Mlp net(std::move(dims), output);
  for (auto& layer : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
        layer.weight(r, c) = bound * (2.0 * uniform01(rng) - 1.0);
  }
  return net;
}

std::size_t Mlp::num_parameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Matrix forward(const Mlp& net, const Matrix& input, ForwardCache* cache) {
  if (input.rows() != net.input_size())
    throw std::invalid_argument("forward: input has " + std::to_string(input.rows()) + " rows, expected " +
                                std::to_string(net.input_size()));
  const auto& layers = net.layers();
  if (cache) {
    cache->activations.clear();
    cache->activations.reserve(layers.size() + 1);
    cache->activations.push_back(input);
    cache->net = &net;
    cache->version = net.version();
  }
  Matrix a = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z(layers[l].weight.rows(), a.cols());
    z.noalias() = layers[l].weight * a;
    z.colwise() += layers[l].bias;
    if (l + 1 < layers.size()) z = z.cwiseMax(0.0);
    else apply_output(z, net.output_activation());
    a = std::move(z);
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

Vector forward(const Mlp& net, const Vector& input) {
  Matrix out = forward(net, Matrix(input), nullptr);
  return out.col(0);
}

BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Matrix& output_grad, bool param_grads) {
  if (cache.net != &net || cache.version != net.version())
    throw StaleCache("backward: cache does not belong to the current parameters");
  const auto& layers = net.layers();
  const auto& acts = cache.activations;
  if (output_grad.rows() != acts.back().rows() || output_grad.cols() != acts.back().cols())
    throw std::invalid_argument("backward: output gradient shape mismatch");

  BackwardResult res;
  if (param_grads) res.params.layers.resize(layers.size());

  Matrix delta = output_grad;
  if (net.output_activation() == OutputActivation::kTanh)
    delta = (delta.array() * (1.0 - acts.back().array().square())).matrix();

  for (std::size_t l = layers.size(); l-- > 0;) {
    const Matrix& a_prev = acts[l];
    if (param_grads) {
      res.params.layers[l].weight.noalias() = delta * a_prev.transpose();
      res.params.layers[l].bias = delta.rowwise().sum();
    }
    Matrix back(layers[l].weight.cols(), delta.cols());
    back.noalias() = layers[l].weight.transpose() * delta;
    if (l > 0) back = (back.array() * (a_prev.array() > 0.0).cast<double>()).matrix();
    delta = std::move(back);
  }
  res.input_grad = std::move(delta);
  return res;
}

Gradients zero_gradients(const Mlp& net) {
  Gradients g;
  for (const auto& l : net.layers())
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  return g;
}

AdamState AdamState::for_net(const Mlp& net) {
  AdamState s;
  s.m = zero_gradients(net).layers;
  s.v = s.m;
  return s;
}

void adam_step(Mlp& net, AdamState& s, const Gradients& grads, double lr) {
  if (grads.layers.size() != net.layers().size() || s.m.size() != net.layers().size())
    throw std::invalid_argument("adam_step: shape mismatch");
  for (std::size_t l = 0; l < grads.layers.size(); ++l) {
    const auto& g = grads.layers[l];
    if (g.weight.rows() != net.layers()[l].weight.rows() || g.weight.cols() != net.layers()[l].weight.cols() ||
        g.bias.size() != net.layers()[l].bias.size())
      throw std::invalid_argument("adam_step: shape mismatch");
    if (!g.weight.allFinite() || !g.bias.allFinite()) throw NonFiniteGradient("adam_step: non-finite gradient");
  }
  s.t += 1;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = s.beta1 * m + (1.0 - s.beta1) * g;
    v = s.beta2 * v + (1.0 - s.beta2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + s.epsilon);
  };
  auto& layers = net.mutable_layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weight, s.m[l].weight, s.v[l].weight, grads.layers[l].weight);
    update(layers[l].bias, s.m[l].bias, s.v[l].bias, grads.layers[l].bias);
  }
}

void soft_update(Mlp& target, const Mlp& online, double beta) {
  if (!target.same_shape(online)) throw std::invalid_argument("soft_update: shape mismatch");
  auto& t = target.mutable_layers();
  const auto& o = online.layers();
  for (std::size_t l = 0; l < t.size(); ++l) {
    t[l].weight = (1.0 - beta) * t[l].weight + beta * o[l].weight;
    t[l].bias = (1.0 - beta) * t[l].bias + beta * o[l].bias;
  }
}

double lr_at(const LrSchedule& schedule, long epoch) {
  if (epoch < 0) throw std::invalid_argument("lr_at: negative epoch");
  return schedule.initial / (1.0 + schedule.decay * static_cast<double>(epoch));
}

void write_checkpoint(std::ostream& out, const Mlp& net) {
  out << "mlp";
  for (int d : net.dims()) out << ' ' << d;
  out << '\n';
  char buf[64];
  auto put = [&](double v) {
    const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << ' ' << std::string_view(buf, static_cast<std::size_t>(n));
  };
  for (const auto& l : net.layers()) {
    out << 'W';
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) put(l.weight(r, c));
    out << "\nb";
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) put(l.bias(r));
    out << '\n';
  }
}

Mlp read_checkpoint(std::istream& in, OutputActivation output) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("checkpoint: missing header");
  std::istringstream header(line);
  std::string tag;
  header >> tag;
  if (tag != "mlp") throw std::runtime_error("checkpoint: expected 'mlp' header");
  std::vector<int> dims;
  for (int d; header >> d;) dims.push_back(d);
  Mlp net(dims, output);

  auto read_values = [&](char expect, Eigen::Index count) {
    if (!std::getline(in, line) || line.empty() || line[0] != expect)
      throw std::runtime_error(std::string("checkpoint: expected '") + expect + "' line");
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(count));
    const char* p = line.data() + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p >= end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw std::runtime_error("checkpoint: malformed number");
      vals.push_back(v);
      p = next;
    }
    if (static_cast<Eigen::Index>(vals.size()) != count) throw std::runtime_error("checkpoint: wrong value count");
    return vals;
  };
  auto& layers = net.mutable_layers();
  for (auto& l : layers) {
    auto w = read_values('W', l.weight.size());
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = w[k++];
    auto b = read_values('b', l.bias.size());
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = b[static_cast<std::size_t>(r)];
  }
  return net;
}

}  // namespace uavsim::nn
