#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "uavsim/mlp.hpp"

using namespace uavsim;
using namespace uavsim::nn;

namespace {

// Scalar loss L = sum(G .* f(X)) for a fixed random G.
double loss(const Mlp& net, const Matrix& x, const Matrix& g) { return (forward(net, x).array() * g.array()).sum(); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 2.0 * uniform01(rng) - 1.0;
  return m;
}

}  // namespace

TEST_CASE("init is deterministic per seed, zero biases") {
  Rng a(1), b(1), c(2);
  const Mlp x = Mlp::init({41, 512, 512, 512, 1}, a);
  const Mlp y = Mlp::init({41, 512, 512, 512, 1}, b);
  const Mlp z = Mlp::init({41, 512, 512, 512, 1}, c);
  bool differs = false;
  for (std::size_t l = 0; l < x.layers().size(); ++l) {
    CHECK(x.layers()[l].weight == y.layers()[l].weight);
    CHECK(x.layers()[l].bias.isZero());
    differs = differs || x.layers()[l].weight != z.layers()[l].weight;
    const double bound = 1.0 / std::sqrt(static_cast<double>(x.layers()[l].weight.cols()));
    CHECK(x.layers()[l].weight.cwiseAbs().maxCoeff() <= bound);
  }
  CHECK(differs);
  CHECK(x.num_parameters() == 41 * 512 + 512 + 2 * (512 * 512 + 512) + 512 + 1);
}

TEST_CASE("forward basics") {
  Mlp zero({3, 4, 2});
  zero.mutable_layers()[1].bias << 0.5, -1.5;
  const Vector out = forward(zero, Vector(Vector::Ones(3)));
  CHECK(out(0) == 0.5);
  CHECK(out(1) == -1.5);

  Mlp lin({3, 2});
  Rng rng(4);
  lin.mutable_layers()[0].weight = random_matrix(2, 3, rng);
  const Vector x = Vector::Random(3);
  CHECK((forward(lin, Vector(3.0 * x)) - 3.0 * forward(lin, x)).norm() < 1e-14);

  // A negative hidden pre-activation contributes nothing downstream.
  Mlp relu({1, 1, 1});
  relu.mutable_layers()[0].weight(0, 0) = -1.0;
  relu.mutable_layers()[1].weight(0, 0) = 5.0;
  CHECK(forward(relu, Vector(Vector::Ones(1)))(0) == 0.0);
  CHECK(forward(relu, Vector(Vector::Constant(1, -2.0)))(0) == 10.0);

  CHECK_THROWS_AS(forward(lin, Vector(Vector::Ones(4))), std::invalid_argument);
}

TEST_CASE("gradients match central differences") {
  Rng rng(2024);
  for (int inst = 0; inst < 20; ++inst) {
    const int in = 1 + static_cast<int>(uniform_index(rng, 8));
    const int h = 2 + static_cast<int>(uniform_index(rng, 15));
    const int out = 1 + static_cast<int>(uniform_index(rng, 2));
    const OutputActivation act = inst % 2 ? OutputActivation::kTanh : OutputActivation::kIdentity;
    Mlp net = Mlp::init({in, h, h, h, out}, rng, act);
    for (auto& l : net.mutable_layers())
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = 0.2 * (2 * uniform01(rng) - 1);
    const Matrix x = random_matrix(in, 3, rng);
    const Matrix g = random_matrix(out, 3, rng);
    ForwardCache cache;
    forward(net, x, &cache);
    const BackwardResult br = backward(net, cache, g);

    const double eps = 1e-4;
    double worst = 0.0;
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      for (Eigen::Index i = 0; i < net.layers()[l].weight.size(); ++i) {
        Mlp p = net, m = net;
        p.mutable_layers()[l].weight.data()[i] += eps;
        m.mutable_layers()[l].weight.data()[i] -= eps;
        const double fd = (loss(p, x, g) - loss(m, x, g)) / (2 * eps);
        worst = std::max(worst, rel_err(fd, br.params.layers[l].weight.data()[i]));
      }
      for (Eigen::Index i = 0; i < net.layers()[l].bias.size(); ++i) {
        Mlp p = net, m = net;
        p.mutable_layers()[l].bias(i) += eps;
        m.mutable_layers()[l].bias(i) -= eps;
        const double fd = (loss(p, x, g) - loss(m, x, g)) / (2 * eps);
        worst = std::max(worst, rel_err(fd, br.params.layers[l].bias(i)));
      }
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Matrix xp = x, xm = x;
      xp.data()[i] += eps;
      xm.data()[i] -= eps;
      const double fd = (loss(net, xp, g) - loss(net, xm, g)) / (2 * eps);
      worst = std::max(worst, rel_err(fd, br.input_grad.data()[i]));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("zero output gradient gives zero gradients") {
  Rng rng(3);
  const Mlp net = Mlp::init({4, 8, 8, 2}, rng);
  ForwardCache cache;
  forward(net, random_matrix(4, 5, rng), &cache);
  const BackwardResult br = backward(net, cache, Matrix::Zero(2, 5));
  for (const auto& l : br.params.layers) {
    CHECK(l.weight.isZero());
    CHECK(l.bias.isZero());
  }
  CHECK(br.input_grad.isZero());
}

TEST_CASE("stale cache is rejected") {
  Rng rng(3);
  Mlp net = Mlp::init({2, 3, 1}, rng);
  ForwardCache cache;
  forward(net, Matrix::Ones(2, 1), &cache);
  net.mutable_layers();
  CHECK_THROWS_AS(backward(net, cache, Matrix::Ones(1, 1)), StaleCache);
  const Mlp other = net;
  forward(net, Matrix::Ones(2, 1), &cache);
  CHECK_THROWS_AS(backward(other, cache, Matrix::Ones(1, 1)), StaleCache);
}

TEST_CASE("Adam") {
  Mlp net({1, 1});
  net.mutable_layers()[0].weight(0, 0) = 1.0;
  AdamState s = AdamState::for_net(net);
  Gradients g = zero_gradients(net);
  g.layers[0].weight(0, 0) = 0.37;
  adam_step(net, s, g, 0.01);
  // First bias-corrected step: m^ = g, v^ = g^2, so the update is lr * g / (|g| + eps).
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(1.0 - 0.01 * 0.37 / (0.37 + 1e-8)).epsilon(1e-15));
  CHECK(s.t == 1);

  Mlp still({2, 2});
  AdamState z = AdamState::for_net(still);
  adam_step(still, z, zero_gradients(still), 0.1);
  CHECK(still.layers()[0].weight.isZero());
  CHECK(z.t == 1);

  Rng rng(5);
  Mlp a = Mlp::init({3, 4, 2}, rng), b = a;
  AdamState sa = AdamState::for_net(a), sb = AdamState::for_net(b);
  Gradients ga = zero_gradients(a);
  ga.layers[0].weight.setConstant(0.3);
  for (int k = 0; k < 3; ++k) {
    adam_step(a, sa, ga, 0.05);
    adam_step(b, sb, ga, 0.05);
  }
  CHECK(a.layers()[0].weight == b.layers()[0].weight);

  Gradients bad = zero_gradients(a);
  bad.layers[1].bias(0) = std::numeric_limits<double>::quiet_NaN();
  const Mlp before = a;
  CHECK_THROWS_AS(adam_step(a, sa, bad, 0.05), NonFiniteGradient);
  CHECK(a.layers()[1].bias == before.layers()[1].bias);
  CHECK(sa.t == 3);
}

TEST_CASE("soft update") {
  Rng rng(6);
  const Mlp online = Mlp::init({3, 5, 2}, rng);
  Mlp target = Mlp::init({3, 5, 2}, rng);
  const Mlp start = target;
  soft_update(target, online, 0.0);
  CHECK(target.layers()[0].weight == start.layers()[0].weight);
  soft_update(target, online, 0.25);
  for (std::size_t l = 0; l < target.layers().size(); ++l) {
    const Matrix before = start.layers()[l].weight - online.layers()[l].weight;
    const Matrix after = target.layers()[l].weight - online.layers()[l].weight;
    CHECK((after - 0.75 * before).cwiseAbs().maxCoeff() < 1e-15);
  }
  soft_update(target, online, 1.0);
  CHECK(target.layers()[1].weight == online.layers()[1].weight);

  Mlp zero({1, 1}), one({1, 1});
  one.mutable_layers()[0].weight(0, 0) = 1.0;
  soft_update(zero, one, 0.01);
  CHECK(zero.layers()[0].weight(0, 0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK_THROWS(soft_update(zero, online, 0.5));
}

TEST_CASE("learning-rate schedule") {
  const LrSchedule s{0.1, 1e-3};
  CHECK(lr_at(s, 0) == 0.1);
  CHECK(lr_at(s, 1000) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(lr_at({0.1, 0.0}, 12345) == 0.1);
}

TEST_CASE("checkpoint round-trip is bit exact") {
  Rng rng(8);
  const Mlp net = Mlp::init({6, 16, 16, 16, 2}, rng, OutputActivation::kTanh);
  std::stringstream ss;
  write_checkpoint(ss, net);
  const std::string text = ss.str();
  CHECK(text.rfind("mlp 6 16 16 16 2\nW ", 0) == 0);
  const Mlp back = read_checkpoint(ss, OutputActivation::kTanh);
  const Matrix x = random_matrix(6, 10, rng);
  const Matrix a = forward(net, x), b = forward(back, x);
  CHECK(a == b);

  std::stringstream broken("mlp 2 1\nW 1\nb 0\n");
  CHECK_THROWS(read_checkpoint(broken));
}
