#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "uwe/nn.hpp"

using namespace uwe;
using testutil::relative_error;

namespace {

Tensor random_tensor(std::vector<int> shape, Prng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = (2.0 * rng.uniform() - 1.0) * scale;
  return t;
}

// Two-conv test network: conv(1->4) relu conv(4->1), loss = mse vs target.
struct TinyNet {
  ConvParams c0, c1;

  double loss(const Tensor& input, const Tensor& target) const {
    const Tensor out = conv2d(relu(conv2d(input, c0)), c1);
    return mse_loss(out, target).loss;
  }
};

}  // namespace

TEST_CASE("conv2d identity kernel reproduces the input") {
  ConvParams p;
  p.weights = Tensor::zeros({1, 1, 3, 3});
  p.weights.data[4] = 1.0;  // center tap
  p.bias = Tensor::zeros({1});
  Prng rng(41);
  const Tensor input = random_tensor({1, 5, 7}, rng);
  CHECK(conv2d(input, p) == input);
}

TEST_CASE("conv2d all-ones kernel on constant input shows the zero padding") {
  ConvParams p;
  p.weights = Tensor::zeros({1, 1, 3, 3});
  for (double& w : p.weights.data) w = 1.0;
  p.bias = Tensor::zeros({1});
  Tensor input({1, 3, 3});
  for (double& v : input.data) v = 1.0;
  const Tensor out = conv2d(input, p);
  CHECK(out.data[4] == 9.0);  // center covers the whole kernel
  CHECK(out.data[0] == 4.0);  // corner covers a 2x2 window
  CHECK(out.data[1] == 6.0);  // edge covers 2x3
}

TEST_CASE("conv2d rejects channel mismatches") {
  Prng rng(42);
  const ConvParams p = he_init(2, 3, 3, 3, rng);
  const Tensor input = random_tensor({2, 4, 4}, rng);
  CHECK_THROWS_AS(conv2d(input, p), Error);
}

TEST_CASE("conv2d is linear in input and weights") {
  Prng rng(43);
  const ConvParams p = he_init(2, 2, 3, 3, rng);
  const Tensor a = random_tensor({2, 6, 6}, rng);
  const Tensor b = random_tensor({2, 6, 6}, rng);
  Tensor sum = a;
  for (std::size_t i = 0; i < sum.data.size(); ++i) sum.data[i] += b.data[i];

  ConvParams no_bias = p;
  for (double& v : no_bias.bias.data) v = 0.0;
  const Tensor ya = conv2d(a, no_bias);
  const Tensor yb = conv2d(b, no_bias);
  const Tensor ysum = conv2d(sum, no_bias);
  for (std::size_t i = 0; i < ysum.data.size(); ++i) {
    CHECK(ysum.data[i] ==
          doctest::Approx(ya.data[i] + yb.data[i]).epsilon(1e-12));
  }

  // Superposition in the weights as well.
  Prng rng2(431);
  ConvParams q = he_init(2, 2, 3, 3, rng2);
  for (double& v : q.bias.data) v = 0.0;
  ConvParams pq = no_bias;
  for (std::size_t i = 0; i < pq.weights.data.size(); ++i) {
    pq.weights.data[i] += q.weights.data[i];
  }
  const Tensor wa = conv2d(a, no_bias);
  const Tensor wb = conv2d(a, q);
  const Tensor wsum = conv2d(a, pq);
  for (std::size_t i = 0; i < wsum.data.size(); ++i) {
    CHECK(wsum.data[i] ==
          doctest::Approx(wa.data[i] + wb.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("conv2d_backward matches finite differences") {
  Prng rng(44);
  const ConvParams p = he_init(2, 1, 3, 3, rng);
  const Tensor input = random_tensor({1, 4, 5}, rng);
  const Tensor target = random_tensor({2, 4, 5}, rng);

  const Tensor out = conv2d(input, p);
  const LossResult loss = mse_loss(out, target);
  const ConvBackward back = conv2d_backward(loss.grad, input, p);

  const double h = 1e-5;
  auto loss_at = [&](const ConvParams& params, const Tensor& in) {
    return mse_loss(conv2d(in, params), target).loss;
  };
  for (std::size_t i = 0; i < p.weights.data.size(); ++i) {
    ConvParams plus = p, minus = p;
    plus.weights.data[i] += h;
    minus.weights.data[i] -= h;
    const double fd = (loss_at(plus, input) - loss_at(minus, input)) / (2 * h);
    CHECK(relative_error(back.grad_weights.data[i], fd) < 1e-6);
  }
  for (std::size_t i = 0; i < p.bias.data.size(); ++i) {
    ConvParams plus = p, minus = p;
    plus.bias.data[i] += h;
    minus.bias.data[i] -= h;
    const double fd = (loss_at(plus, input) - loss_at(minus, input)) / (2 * h);
    CHECK(relative_error(back.grad_bias.data[i], fd) < 1e-6);
  }
  for (std::size_t i = 0; i < input.data.size(); ++i) {
    Tensor plus = input, minus = input;
    plus.data[i] += h;
    minus.data[i] -= h;
    const double fd = (loss_at(p, plus) - loss_at(p, minus)) / (2 * h);
    CHECK(relative_error(back.grad_input.data[i], fd) < 1e-6);
  }
}

TEST_CASE("relu clamps negatives and gates gradients") {
  Tensor x({1, 1, 3});
  x.data = {-1.0, 0.0, 2.0};
  const Tensor y = relu(x);
  CHECK(y.data == std::vector<double>{0.0, 0.0, 2.0});

  Tensor grad({1, 1, 3});
  grad.data = {5.0, 5.0, 5.0};
  const Tensor gx = relu_backward(grad, x);
  CHECK(gx.data == std::vector<double>{0.0, 0.0, 5.0});  // derivative at 0 is 0

  Tensor neg({1, 1, 1});
  neg.data = {-3.0};
  Tensor g1({1, 1, 1});
  g1.data = {1.0};
  CHECK(relu_backward(g1, neg).data[0] == 0.0);
}

TEST_CASE("sigmoid values and derivative") {
  Tensor x({1, 1, 3});
  x.data = {0.0, 40.0, -40.0};
  const Tensor y = sigmoid(x);
  CHECK(y.data[0] == 0.5);
  CHECK(std::abs(y.data[1] - 1.0) < 1e-12);
  CHECK(y.data[2] > 0.0);
  CHECK(y.data[2] < 1e-12);

  Tensor ones({1, 1, 3});
  ones.data = {1.0, 1.0, 1.0};
  const Tensor g = sigmoid_backward(ones, y);
  CHECK(g.data[0] == doctest::Approx(0.25));  // 0.5 * 0.5
}

TEST_CASE("avgpool2 averages blocks and distributes gradients") {
  Tensor x({1, 2, 2});
  x.data = {1.0, 2.0, 3.0, 4.0};
  const Tensor y = avgpool2(x);
  CHECK(y.data == std::vector<double>{2.5});

  Tensor c({2, 4, 4});
  for (double& v : c.data) v = 7.5;
  const Tensor yc = avgpool2(c);
  for (double v : yc.data) CHECK(v == 7.5);

  Tensor grad({1, 1, 1});
  grad.data = {1.0};
  const Tensor gx = avgpool2_backward(grad);
  for (double v : gx.data) CHECK(v == 0.25);

  Tensor odd({1, 3, 4});
  CHECK_THROWS_AS(avgpool2(odd), Error);
}

TEST_CASE("upsample2 replicates and its backward sums blocks") {
  Tensor x({1, 1, 1});
  x.data = {7.0};
  const Tensor y = upsample2(x);
  CHECK(y.data == std::vector<double>{7.0, 7.0, 7.0, 7.0});

  Tensor grad({1, 2, 2});
  grad.data = {1.0, 2.0, 3.0, 4.0};
  CHECK(upsample2_backward(grad).data == std::vector<double>{10.0});
}

TEST_CASE("avgpool2 after upsample2 is the identity") {
  Prng rng(45);
  for (int i = 0; i < 20; ++i) {
    const Tensor x = random_tensor({3, 4, 6}, rng);
    const Tensor round = avgpool2(upsample2(x));
    REQUIRE(round.shape == x.shape);
    for (std::size_t j = 0; j < x.data.size(); ++j) {
      CHECK(round.data[j] == doctest::Approx(x.data[j]).epsilon(1e-15));
    }
  }
}

TEST_CASE("mse_loss value and gradient") {
  Tensor pred({1, 1, 1});
  pred.data = {3.0};
  Tensor target({1, 1, 1});
  target.data = {1.0};
  const LossResult r = mse_loss(pred, target);
  CHECK(r.loss == 4.0);
  CHECK(r.grad.data[0] == 4.0);

  const LossResult zero = mse_loss(target, target);
  CHECK(zero.loss == 0.0);
  CHECK(zero.grad.data[0] == 0.0);

  // Finite differences on a larger tensor.
  Prng rng(46);
  const Tensor p = random_tensor({2, 3, 3}, rng);
  const Tensor t = random_tensor({2, 3, 3}, rng);
  const LossResult loss = mse_loss(p, t);
  const double h = 1e-6;
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    Tensor plus = p, minus = p;
    plus.data[i] += h;
    minus.data[i] -= h;
    const double fd =
        (mse_loss(plus, t).loss - mse_loss(minus, t).loss) / (2 * h);
    CHECK(relative_error(loss.grad.data[i], fd) < 1e-8);
  }
}

TEST_CASE("adam leaves parameters alone when gradients are zero") {
  Tensor p({4});
  p.data = {1.0, -2.0, 3.0, 0.5};
  const Tensor before = p;
  AdamState state = AdamState::for_param(p);
  adam_step(p, Tensor::zeros({4}), state, AdamConfig{});
  CHECK(p == before);
  CHECK(state.t == 1);
}

TEST_CASE("adam first step magnitude is about lr for any gradient scale") {
  for (double g : {1e-3, 0.5, 1.0, 1e3}) {
    Tensor p({1});
    p.data = {0.0};
    Tensor grad({1});
    grad.data = {g};
    AdamState state = AdamState::for_param(p);
    AdamConfig cfg;
    cfg.lr = 1e-3;
    adam_step(p, grad, state, cfg);
    // m_hat = g, v_hat = g^2 at t = 1, so the update is lr * g/(|g| + eps).
    const double expected = cfg.lr * g / (std::abs(g) + cfg.epsilon);
    CHECK(p.data[0] == doctest::Approx(-expected).epsilon(1e-9));
    CHECK(std::abs(p.data[0]) == doctest::Approx(cfg.lr).epsilon(1e-4));
  }
}

TEST_CASE("prng emits the published first output for seed 0") {
  Prng rng(0);
  CHECK(rng.next_u64() == 0xE220A8397B1DCDAFull);
}

TEST_CASE("prng streams are reproducible and uniform values lie in [0,1)") {
  Prng a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Prng c(6789);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("he_init draws within the fan-in bound, reproducibly") {
  Prng rng(47);
  const ConvParams p = he_init(4, 16, 3, 3, rng);
  const double bound = std::sqrt(6.0 / 144.0);
  CHECK(bound == doctest::Approx(0.2041).epsilon(1e-3));
  for (double w : p.weights.data) {
    CHECK(w > -bound);
    CHECK(w < bound);
  }
  for (double b : p.bias.data) CHECK(b == 0.0);

  Prng rng2(47);
  const ConvParams q = he_init(4, 16, 3, 3, rng2);
  CHECK(p.weights == q.weights);
}

TEST_CASE("two-layer network gradients match finite differences") {
  Prng rng(48);
  TinyNet net;
  net.c0 = he_init(4, 1, 3, 3, rng);
  net.c1 = he_init(1, 4, 3, 3, rng);
  const Tensor input = random_tensor({1, 8, 8}, rng);
  const Tensor target = random_tensor({1, 8, 8}, rng, 0.5);

  // Analytic gradients by chaining the layer backward kernels.
  const Tensor a0 = conv2d(input, net.c0);
  const Tensor r0 = relu(a0);
  const Tensor out = conv2d(r0, net.c1);
  const LossResult loss = mse_loss(out, target);
  const ConvBackward b1 = conv2d_backward(loss.grad, r0, net.c1);
  const Tensor g0 = relu_backward(b1.grad_input, a0);
  const ConvBackward b0 = conv2d_backward(g0, input, net.c0);

  const double h = 1e-5;
  Prng pick(49);
  for (int trial = 0; trial < 50; ++trial) {
    // Alternate between the four parameter tensors and the input.
    const int which = trial % 5;
    TinyNet plus = net, minus = net;
    Tensor in_plus = input, in_minus = input;
    double analytic = 0.0;
    switch (which) {
      case 0: {
        const auto i = pick.uniform_index(net.c0.weights.size());
        plus.c0.weights.data[i] += h;
        minus.c0.weights.data[i] -= h;
        analytic = b0.grad_weights.data[i];
        break;
      }
      case 1: {
        const auto i = pick.uniform_index(net.c0.bias.size());
        plus.c0.bias.data[i] += h;
        minus.c0.bias.data[i] -= h;
        analytic = b0.grad_bias.data[i];
        break;
      }
      case 2: {
        const auto i = pick.uniform_index(net.c1.weights.size());
        plus.c1.weights.data[i] += h;
        minus.c1.weights.data[i] -= h;
        analytic = b1.grad_weights.data[i];
        break;
      }
      case 3: {
        const auto i = pick.uniform_index(net.c1.bias.size());
        plus.c1.bias.data[i] += h;
        minus.c1.bias.data[i] -= h;
        analytic = b1.grad_bias.data[i];
        break;
      }
      default: {
        const auto i = pick.uniform_index(input.size());
        in_plus.data[i] += h;
        in_minus.data[i] -= h;
        analytic = b0.grad_input.data[i];
        break;
      }
    }
    const double fd =
        (plus.loss(in_plus, target) - minus.loss(in_minus, target)) / (2 * h);
    CHECK(relative_error(analytic, fd) < 1e-6);
  }
}

TEST_CASE("kernels are deterministic across repeated evaluation") {
  Prng rng(50);
  const ConvParams p = he_init(3, 2, 3, 3, rng);
  const Tensor input = random_tensor({2, 8, 8}, rng);
  const Tensor once = conv2d(input, p);
  const Tensor twice = conv2d(input, p);
  CHECK(once == twice);
}
