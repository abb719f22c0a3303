#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "gradcheck.hpp"
#include "talkgen/nn/checkpoint.hpp"
#include "talkgen/nn/layers.hpp"
#include "talkgen/nn/optim.hpp"

using namespace talkgen;
using nn::Rng;
using nn::Tensor;

TEST_CASE("pointwise ops: values and gradients") {
  Rng rng(11);
  Tensor x = random_tensor({4, 5}, rng);

  CHECK(gradcheck([&] { return nn::mean_all(nn::mul(x, x)); }, {x}) < 1e-3);
  CHECK(gradcheck([&] { return nn::mean_all(nn::gelu(x)); }, {x}) < 1e-3);
  CHECK(gradcheck([&] { return nn::mean_all(nn::tanh(x)); }, {x}) < 1e-3);
  CHECK(gradcheck([&] { return nn::mean_all(nn::sigmoid(x)); }, {x}) < 1e-3);
  Tensor xo = random_tensor_offzero({4, 5}, rng);
  CHECK(gradcheck([&] { return nn::mean_all(nn::leaky_relu(xo, 0.2f)); }, {xo}) < 1e-3);
  CHECK(gradcheck([&] { return nn::mean_all(nn::relu(xo)); }, {xo}) < 1e-3);

  Tensor pos = nn::Tensor::from_data({3}, {0.5f, 1.5f, 2.5f}, true);
  CHECK(gradcheck([&] { return nn::mean_all(nn::log(pos)); }, {pos}) < 1e-3);

  Tensor y = nn::add_scalar(nn::mul_scalar(x, 2.0f), 1.0f);
  CHECK(y.data()[0] == doctest::Approx(2.0f * x.data()[0] + 1.0f));
}

TEST_CASE("binary ops and broadcasting") {
  Rng rng(12);
  Tensor a = random_tensor({3, 4}, rng);
  Tensor b = random_tensor({3, 4}, rng);
  Tensor c = random_tensor({4}, rng);
  CHECK(gradcheck([&] { return nn::mean_all(nn::mul(nn::add(a, b), nn::sub(a, b))); }, {a, b}) <
        1e-3);
  CHECK(gradcheck([&] { return proj_loss(nn::add_broadcast(a, c)); }, {a, c}) < 2e-3);
  CHECK(gradcheck([&] { return nn::dot(nn::reshape(a, {12}), nn::reshape(b, {12})); }, {a, b}) <
        1e-3);
}

TEST_CASE("clamp passes gradient only inside the interval") {
  Tensor x = nn::Tensor::from_data({3}, {-2.0f, 0.3f, 2.0f}, true);
  Tensor y = nn::sum_all(nn::clamp(x, -1.0f, 1.0f));
  y.backward();
  CHECK(x.grad()[0] == 0.0f);
  CHECK(x.grad()[1] == 1.0f);
  CHECK(x.grad()[2] == 0.0f);
  CHECK(y.item() == doctest::Approx(-1.0f + 0.3f + 1.0f));
}

TEST_CASE("matmul / bmm / linear gradients") {
  Rng rng(13);
  Tensor a = random_tensor({3, 4}, rng);
  Tensor b = random_tensor({4, 5}, rng);
  CHECK(gradcheck([&] { return nn::mean_all(nn::matmul(a, b)); }, {a, b}) < 1e-3);

  Tensor ba = random_tensor({2, 3, 4}, rng);
  Tensor bb = random_tensor({2, 4, 5}, rng);
  Tensor bt = random_tensor({2, 5, 4}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::bmm(ba, bb)); }, {ba, bb}) < 2e-3);
  CHECK(gradcheck([&] { return proj_loss(nn::bmm(ba, bt, true)); }, {ba, bt}) < 2e-3);

  Tensor x = random_tensor({4, 6}, rng);
  Tensor w = random_tensor({3, 6}, rng);
  Tensor bias = random_tensor({3}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::linear(x, w, bias)); }, {x, w, bias}) <
        2e-3);
}

TEST_CASE("shape ops keep gradients consistent") {
  Rng rng(14);
  Tensor a = random_tensor({2, 3, 4, 4}, rng);
  Tensor b = random_tensor({2, 2, 4, 4}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::concat_channels(a, b)); }, {a, b}) <
        2e-3);
  CHECK(gradcheck([&] { return proj_loss(nn::slice_channels(a, 1, 3)); }, {a}) < 2e-3);
  CHECK(gradcheck([&] { return proj_loss(nn::slice_spatial(a, 1, 3, 0, 2)); }, {a}) <
        2e-3);
  CHECK(gradcheck([&] { return proj_loss(nn::avg_pool2d(a, 2)); }, {a}) < 2e-3);
  CHECK(gradcheck([&] { return proj_loss(nn::global_avg_pool2d(a)); }, {a}) < 2e-3);

  Tensor vec = random_tensor({2, 3}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::broadcast_spatial(vec, 4, 4)); }, {vec}) <
        2e-3);

  Tensor gamma = random_tensor({2, 3}, rng);
  Tensor beta = random_tensor({2, 3}, rng);
  Tensor x = random_tensor({2, 3, 4, 4}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::channel_affine(x, gamma, beta)); },
                  {x, gamma, beta}) < 2e-3);
}

TEST_CASE("pixel shuffle is an exact channel-to-space permutation") {
  Rng rng(15);
  Tensor x = random_tensor({2, 8, 3, 3}, rng);
  Tensor y = nn::pixel_shuffle(x, 2);
  CHECK(y.shape() == nn::Shape{2, 2, 6, 6});
  double in_sq = 0.0, out_sq = 0.0;
  for (float v : x.values()) in_sq += static_cast<double>(v) * v;
  for (float v : y.values()) out_sq += static_cast<double>(v) * v;
  CHECK(std::fabs(in_sq - out_sq) < 1e-6 * std::max(1.0, in_sq));
  CHECK(gradcheck([&] { return proj_loss(nn::pixel_shuffle(x, 2)); }, {x}) < 2e-3);
}

TEST_CASE("attention helpers round-trip") {
  Rng rng(16);
  Tensor x = random_tensor({2, 3, 8}, rng);
  Tensor rt = nn::merge_heads(nn::split_heads(x, 4), 4);
  for (int64_t i = 0; i < x.numel(); ++i) CHECK(rt.data()[i] == x.data()[i]);
  CHECK(gradcheck([&] { return proj_loss(nn::split_heads(x, 2)); }, {x}) < 2e-3);
}

TEST_CASE("conv2d forward matches direct convolution") {
  Rng rng(17);
  Tensor x = random_tensor({1, 2, 5, 5}, rng);
  Tensor w = random_tensor({3, 2, 3, 3}, rng);
  Tensor bias = random_tensor({3}, rng);
  Tensor y = nn::conv2d(x, w, bias, 2, 1);
  CHECK(y.shape() == nn::Shape{1, 3, 3, 3});
  // direct evaluation at one output location
  const int oc = 1, oh = 1, ow = 2;
  double acc = bias.data()[oc];
  for (int c = 0; c < 2; ++c)
    for (int ki = 0; ki < 3; ++ki)
      for (int kj = 0; kj < 3; ++kj) {
        const int h = oh * 2 - 1 + ki, wcol = ow * 2 - 1 + kj;
        if (h < 0 || h >= 5 || wcol < 0 || wcol >= 5) continue;
        acc += x.data()[(c * 5 + h) * 5 + wcol] *
               w.data()[((oc * 2 + c) * 3 + ki) * 3 + kj];
      }
  CHECK(y.data()[(oc * 3 + oh) * 3 + ow] == doctest::Approx(acc).epsilon(1e-4));
}

TEST_CASE("conv gradients") {
  Rng rng(18);
  Tensor x = random_tensor({2, 3, 6, 6}, rng);
  Tensor w = random_tensor({4, 3, 3, 3}, rng, true, 0.5);
  Tensor bias = random_tensor({4}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::conv2d(x, w, bias, 1, 1)); },
                  {x, w, bias}, 48) < 2e-3);
  CHECK(gradcheck([&] { return proj_loss(nn::conv2d(x, w, bias, 2, 1)); },
                  {x, w, bias}, 48) < 2e-3);

  Tensor x1 = random_tensor({2, 2, 9}, rng);
  Tensor w1 = random_tensor({4, 2, 3}, rng, true, 0.5);
  Tensor b1 = random_tensor({4}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::conv1d(x1, w1, b1, 1, 1)); },
                  {x1, w1, b1}, 48) < 2e-3);
}

TEST_CASE("conv1d pads only along the sequence axis") {
  Tensor x = nn::Tensor::from_data({1, 1, 3}, {1.0f, 2.0f, 3.0f});
  Tensor w = nn::Tensor::from_data({1, 1, 3}, {1.0f, 1.0f, 1.0f});
  Tensor y = nn::conv1d(x, w, Tensor(), 1, 1);
  CHECK(y.shape() == nn::Shape{1, 1, 3});
  CHECK(y.data()[0] == doctest::Approx(3.0f));
  CHECK(y.data()[1] == doctest::Approx(6.0f));
  CHECK(y.data()[2] == doctest::Approx(5.0f));
}

TEST_CASE("normalization ops") {
  Rng rng(19);
  Tensor x = random_tensor({3, 6}, rng);
  Tensor gamma = random_tensor({6}, rng);
  Tensor beta = random_tensor({6}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::layer_norm(x, gamma, beta)); },
                  {x, gamma, beta}) < 2e-3);

  Tensor xi = random_tensor({2, 3, 4, 4}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::instance_norm2d(xi)); }, {xi}) < 2e-3);

  // instance norm leaves each (n,c) plane standardized
  Tensor y = nn::instance_norm2d(xi);
  for (int r = 0; r < 6; ++r) {
    double m = 0.0, v = 0.0;
    for (int j = 0; j < 16; ++j) m += y.data()[r * 16 + j];
    m /= 16.0;
    for (int j = 0; j < 16; ++j) {
      const double d = y.data()[r * 16 + j] - m;
      v += d * d;
    }
    CHECK(std::fabs(m) < 1e-5);
    CHECK(std::fabs(std::sqrt(v / 16.0) - 1.0) < 1e-3);
  }

  CHECK(gradcheck([&] { return proj_loss(nn::softmax_lastdim(x)); }, {x}) < 2e-3);
}

TEST_CASE("batch norm train and eval modes") {
  Rng rng(20);
  Tensor x = random_tensor({4, 3, 5, 5}, rng);
  nn::ParamStore ps;
  auto bn = nn::BatchNorm2dLayer::make(ps, "bn", 3);
  CHECK(gradcheck([&] { return proj_loss(bn(x, true)); },
                  {x, bn.gamma, bn.beta}, 48) < 2e-3);

  // Feed a constant batch until the running stats converge to it, then
  // check eval-mode output uses them.
  for (int i = 0; i < 200; ++i) (void)bn(x, true);
  Tensor y_eval = bn(x, false);
  Tensor y_train = bn(x, true);
  double max_diff = 0.0;
  for (int64_t i = 0; i < y_eval.numel(); ++i)
    max_diff = std::max(max_diff,
                        std::fabs(static_cast<double>(y_eval.data()[i]) - y_train.data()[i]));
  CHECK(max_diff < 2e-2);
  CHECK(gradcheck([&] { return proj_loss(bn(x, false)); },
                  {x, bn.gamma, bn.beta}, 48) < 2e-3);
}

TEST_CASE("losses") {
  Rng rng(21);
  Tensor a = random_tensor({4, 4}, rng);
  // Keep |a-b| bounded away from zero so the MAE kink is not straddled.
  Tensor diff = random_tensor_offzero({4, 4}, rng, 0.3);
  std::vector<float> bdata(16);
  for (int i = 0; i < 16; ++i) bdata[static_cast<size_t>(i)] = a.data()[i] + diff.data()[i];
  Tensor b = Tensor::from_data({4, 4}, std::move(bdata), true);
  CHECK(gradcheck([&] { return nn::mae(a, b); }, {a, b}) < 2e-3);
  CHECK(gradcheck([&] { return nn::mse(a, b); }, {a, b}) < 1e-3);

  Tensor logits = random_tensor({6}, rng);
  Tensor targets = nn::Tensor::from_data({6}, {1, 0, 1, 0, 1, 1});
  CHECK(gradcheck([&] { return nn::bce_with_logits(logits, targets); }, {logits}) < 1e-3);

  Tensor v = random_tensor({8}, rng);
  CHECK(gradcheck([&] { return proj_loss(nn::l2_normalize(v)); }, {v}) < 2e-3);
  Tensor u = nn::l2_normalize(v);
  double norm = 0.0;
  for (float val : u.values()) norm += static_cast<double>(val) * val;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("adam minimizes a quadratic") {
  nn::ParamStore ps;
  Tensor w = ps.param("w", {4}, {3.0f, -2.0f, 1.5f, 0.5f});
  nn::Adam opt(ps.trainable(), {.lr = 0.05f, .beta1 = 0.5f, .beta2 = 0.999f, .eps = 1e-8f});
  for (int i = 0; i < 300; ++i) {
    opt.zero_grad();
    Tensor loss = nn::mean_all(nn::mul(w, w));
    loss.backward();
    opt.step();
  }
  for (float v : w.values()) CHECK(std::fabs(v) < 1e-2);
}

TEST_CASE("checkpoint round-trip is bit exact and verifies digests") {
  const std::string path = std::filesystem::temp_directory_path().string() + "/tg_test_ckpt.bin";
  Rng rng(22);
  nn::ParamStore ps;
  auto conv = nn::Conv2dLayer::make(ps, "conv", 3, 8, 3, 1, 1, rng);
  auto bn = nn::BatchNorm2dLayer::make(ps, "bn", 8);
  bn.run_mean.data()[2] = 0.25f;
  nn::save_checkpoint(path, ps, {.step = 42, .config_digest = 0xabcdef});

  Rng rng2(99);
  nn::ParamStore ps2;
  auto conv2 = nn::Conv2dLayer::make(ps2, "conv", 3, 8, 3, 1, 1, rng2);
  auto bn2 = nn::BatchNorm2dLayer::make(ps2, "bn", 8);
  const auto meta = nn::load_checkpoint(path, ps2, 0xabcdef);
  CHECK(meta.step == 42);
  for (int64_t i = 0; i < conv.w.numel(); ++i) CHECK(conv2.w.data()[i] == conv.w.data()[i]);
  CHECK(bn2.run_mean.data()[2] == 0.25f);
  CHECK_THROWS_AS(nn::load_checkpoint(path, ps2, 0x1234), RuntimeFault);
  std::filesystem::remove(path);
}

TEST_CASE("parameter init is seed deterministic") {
  Rng a(123), b(123);
  nn::ParamStore pa, pb;
  Tensor wa = pa.he_param("w", {16, 16}, 16, a);
  Tensor wb = pb.he_param("w", {16, 16}, 16, b);
  for (int64_t i = 0; i < wa.numel(); ++i) CHECK(wa.data()[i] == wb.data()[i]);
}
