#include <doctest.h>

#include <cmath>
#include <vector>

#include "gradcheck.hpp"
#include "hyperseg/adam.hpp"
#include "hyperseg/conv.hpp"
#include "hyperseg/rng.hpp"
#include "hyperseg/tensor.hpp"

using namespace hyperseg;
using namespace hyperseg::nn;
using hyperseg::testing::max_rel_grad_err;

namespace {
constexpr double kGradTol = 1e-4;
}

TEST_CASE("construction and basic accessors") {
  Tensor t = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.numel() == 6);
  CHECK(t.size(0) == 2);
  CHECK(t.size(1) == 3);
  CHECK(!t.requires_grad());
  CHECK(Tensor::scalar(2.5).item() == 2.5);
  CHECK_THROWS_AS(Tensor::from_data({2, 2}, {1.0}), ShapeError);
  CHECK_THROWS_AS(t.item(), ShapeError);
  CHECK(Tensor::full({3}, 7.0).data() == std::vector<double>{7, 7, 7});
}

TEST_CASE("elementwise forward values") {
  Tensor a = Tensor::from_data({4}, {1.0, -2.0, 0.5, 3.0});
  Tensor b = Tensor::from_data({4}, {2.0, 4.0, -1.0, 0.5});
  CHECK((a + b).data() == std::vector<double>{3.0, 2.0, -0.5, 3.5});
  CHECK((a - b).data() == std::vector<double>{-1.0, -6.0, 1.5, 2.5});
  CHECK((a * b).data() == std::vector<double>{2.0, -8.0, -0.5, 1.5});
  CHECK((a / b).data() == std::vector<double>{0.5, -0.5, -0.5, 6.0});
  CHECK((a * 2.0).data() == std::vector<double>{2.0, -4.0, 1.0, 6.0});
  CHECK((a + 1.0).data() == std::vector<double>{2.0, -1.0, 1.5, 4.0});
  CHECK(relu(a).data() == std::vector<double>{1.0, 0.0, 0.5, 3.0});
  CHECK(clamp_min(a, 0.6).data() == std::vector<double>{1.0, 0.6, 0.6, 3.0});
  CHECK(std::abs(exp(a).data()[0] - std::exp(1.0)) < 1e-15);
  CHECK(std::abs(tanh(a).data()[3] - std::tanh(3.0)) < 1e-15);
}

TEST_CASE("broadcasting rules") {
  Tensor a = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor r = Tensor::from_data({2, 1}, {10, 100});
  Tensor c = Tensor::from_data({1, 3}, {1, 2, 3});
  CHECK((a * r).data() == std::vector<double>{10, 20, 30, 400, 500, 600});
  CHECK((a + c).data() == std::vector<double>{2, 4, 6, 5, 7, 9});
  CHECK((a * Tensor::scalar(2.0)).data() == std::vector<double>{2, 4, 6, 8, 10, 12});
  CHECK((Tensor::scalar(1.0) - a).size(1) == 3);
  CHECK_THROWS_AS(add(a, Tensor::from_data({2, 2}, {1, 2, 3, 4})), ShapeError);
  CHECK_THROWS_AS(add(a, Tensor::from_data({6}, {1, 2, 3, 4, 5, 6})), ShapeError);
}

TEST_CASE("reductions and structure ops") {
  Tensor a = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(sum(a).item() == 21.0);
  CHECK(mean(a).item() == 3.5);
  CHECK(row_sums(a).data() == std::vector<double>{6, 15});
  CHECK(col_sums(a).data() == std::vector<double>{5, 7, 9});
  CHECK(row(a, 1).data() == std::vector<double>{4, 5, 6});
  CHECK(reshape(a, {3, 2}).size(0) == 3);
  CHECK_THROWS_AS(reshape(a, {4, 2}), ShapeError);
  CHECK_THROWS_AS(row(a, 2), ShapeError);
  Tensor cat = concat_rows({a, row(a, 0)});
  CHECK(cat.size(0) == 3);
  CHECK(cat.data() == std::vector<double>{1, 2, 3, 4, 5, 6, 1, 2, 3});
}

TEST_CASE("backward on a diamond graph accumulates") {
  Tensor x = Tensor::from_data({1}, {3.0}, true);
  Tensor y = x * x + x;  // dy/dx = 2x + 1 = 7
  y.backward();
  CHECK(x.grad()[0] == doctest::Approx(7.0));

  // Second backward run on a fresh graph adds into existing grad.
  Tensor y2 = x * 2.0;
  y2.backward();
  CHECK(x.grad()[0] == doctest::Approx(9.0));
  x.zero_grad();
  CHECK(x.grad()[0] == 0.0);
}

TEST_CASE("NoGradGuard suppresses graph construction") {
  Tensor x = Tensor::from_data({2}, {1.0, 2.0}, true);
  {
    NoGradGuard ng;
    Tensor y = sum(x * x);
    CHECK(!y.requires_grad());
  }
  Tensor y = sum(x * x);
  CHECK(y.requires_grad());
}

TEST_CASE("backward requires scalar root") {
  Tensor x = Tensor::from_data({2}, {1.0, 2.0}, true);
  Tensor y = x * 2.0;
  CHECK_THROWS_AS(y.backward(), ShapeError);
}

TEST_CASE("finite-difference gradients: elementwise and reductions") {
  Rng rng(7);
  Tensor a = Tensor::randn({3, 4}, rng, 0.8, true);
  Tensor b = Tensor::randn({3, 4}, rng, 0.8, true);
  // keep b away from zero for division
  for (double& e : b.mutable_data()) e += (e >= 0 ? 1.5 : -1.5);

  std::vector<Tensor> ab{a, b};
  auto check = [&](const char* name, auto builder) {
    std::vector<Tensor> inputs{a, b};
    const double err = max_rel_grad_err(builder, inputs);
    INFO(name);
    CHECK(err < kGradTol);
  };

  check("add", [](const std::vector<Tensor>& in) { return sum(in[0] + in[1]); });
  check("sub*mul", [](const std::vector<Tensor>& in) {
    return sum((in[0] - in[1]) * in[0]);
  });
  check("div", [](const std::vector<Tensor>& in) { return sum(in[0] / in[1]); });
  check("exp", [](const std::vector<Tensor>& in) { return sum(exp(in[0] * 0.3)); });
  check("log", [](const std::vector<Tensor>& in) {
    return sum(log(clamp_min(in[1] * in[1], 0.1)));
  });
  check("sqrt", [](const std::vector<Tensor>& in) {
    return sum(sqrt(in[0] * in[0] + 0.5));
  });
  check("tanh", [](const std::vector<Tensor>& in) { return sum(tanh(in[0])); });
  check("asinh", [](const std::vector<Tensor>& in) { return sum(asinh(in[0] * 2.0)); });
  check("atanh", [](const std::vector<Tensor>& in) {
    return sum(atanh(tanh(in[0]) * 0.9));
  });
  check("mean", [](const std::vector<Tensor>& in) { return mean(in[0] * in[1]); });
  check("row_sums", [](const std::vector<Tensor>& in) {
    return sum(row_sums(in[0]) * row_sums(in[1]));
  });
  check("col_sums", [](const std::vector<Tensor>& in) {
    return sum(col_sums(in[0] * in[0]));
  });
  check("reshape+row", [](const std::vector<Tensor>& in) {
    return sum(row(reshape(in[0] * in[1], {4, 3}), 2));
  });
  check("concat_rows", [](const std::vector<Tensor>& in) {
    return sum(concat_rows({in[0], in[1] * 2.0}) * 0.5);
  });
  check("broadcast rowcol", [](const std::vector<Tensor>& in) {
    return sum(mul(in[0], row_sums(in[1])) + mul(in[1], col_sums(in[0])));
  });
  check("scalar broadcast", [](const std::vector<Tensor>& in) {
    return sum(mul(in[0], sum(in[1])));
  });
}

TEST_CASE("finite-difference gradients: smooth ratio kernels") {
  // FD probes must stay clear of the s >= 0 clamp, so the smallest input is
  // well above the step size; series-branch derivatives are checked exactly.
  Tensor s = Tensor::from_data({5}, {1e-5, 1e-3, 0.01, 0.3, 0.8}, true);
  std::vector<Tensor> in{s};

  auto tr = [](const std::vector<Tensor>& in) { return sum(tanh_ratio(in[0])); };
  auto ar = [](const std::vector<Tensor>& in) { return sum(atanh_ratio(in[0])); };
  auto sr = [](const std::vector<Tensor>& in) { return sum(sinh_ratio(in[0])); };
  CHECK(max_rel_grad_err(tr, in, 1e-7) < kGradTol);
  CHECK(max_rel_grad_err(ar, in, 1e-7) < kGradTol);
  CHECK(max_rel_grad_err(sr, in, 1e-7) < kGradTol);

  // Series branch: analytic derivatives near zero and continuity across the
  // branch threshold.
  Tensor tiny = Tensor::from_data({3}, {0.0, 1e-12, 9e-9}, true);
  Tensor g = sum(tanh_ratio(tiny));
  g.backward();
  CHECK(std::abs(tiny.grad()[0] + 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(tiny.grad()[1] + 1.0 / 3.0) < 1e-10);
  tiny.zero_grad();
  sum(atanh_ratio(tiny)).backward();
  CHECK(std::abs(tiny.grad()[0] - 1.0 / 3.0) < 1e-12);
  tiny.zero_grad();
  sum(sinh_ratio(tiny)).backward();
  CHECK(std::abs(tiny.grad()[0] - 1.0 / 6.0) < 1e-12);
  for (double fn : {1.0, -1.0}) {
    const double lo = 1e-8 * (1.0 - 1e-6 * fn);
    const double hi = 1e-8 * (1.0 + 1e-6 * fn);
    CHECK(std::abs(tanh_ratio(Tensor::scalar(lo)).item() -
                   tanh_ratio(Tensor::scalar(hi)).item()) < 1e-14);
  }

  // Values match the direct formulas on the exact branch and the limit at 0.
  const auto tv = tanh_ratio(s).data();
  CHECK(std::abs(tv[0] - std::tanh(std::sqrt(1e-5)) / std::sqrt(1e-5)) < 1e-14);
  CHECK(std::abs(tv[3] - std::tanh(std::sqrt(0.3)) / std::sqrt(0.3)) < 1e-12);
  const auto av = atanh_ratio(s).data();
  CHECK(std::abs(av[0] - 1.0) < 1e-5);
  CHECK(std::abs(av[4] - std::atanh(std::sqrt(0.8)) / std::sqrt(0.8)) < 1e-12);
  const auto sv = sinh_ratio(s).data();
  CHECK(std::abs(sv[0] - 1.0) < 1e-5);
  CHECK(std::abs(sv[3] - std::sinh(std::sqrt(0.3)) / std::sqrt(0.3)) < 1e-12);
  CHECK(tanh_ratio(Tensor::scalar(0.0)).item() == 1.0);
  CHECK(atanh_ratio(Tensor::scalar(0.0)).item() == 1.0);
  CHECK(sinh_ratio(Tensor::scalar(0.0)).item() == 1.0);
}

TEST_CASE("conv3d forward matches a hand-computed case") {
  // 1 channel, 3x3x3 input, k=3, stride 1, padding 0: plain dot product.
  std::vector<double> xv(27), wv(27);
  for (int i = 0; i < 27; ++i) {
    xv[i] = i + 1;
    wv[i] = (i % 3 == 0) ? 1.0 : 0.0;
  }
  Tensor x = Tensor::from_data({1, 3, 3, 3}, xv);
  Tensor w = Tensor::from_data({1, 1, 3, 3, 3}, wv);
  Tensor b = Tensor::from_data({1}, {0.5});
  Tensor y = conv3d(x, w, b, 1, 0);
  CHECK(y.shape() == Shape{1, 1, 1, 1});
  double expect = 0.5;
  for (int i = 0; i < 27; i += 3) expect += xv[i];
  CHECK(y.item() == doctest::Approx(expect));

  // Stride-2, padding 2, k=5 on a 16-voxel edge produces an 8-voxel edge
  // (the encoder downsampling configuration).
  Rng rng(9);
  Tensor x2 = Tensor::randn({2, 16, 6, 6}, rng);
  Tensor w2 = Tensor::randn({3, 2, 5, 5, 5}, rng, 0.1);
  Tensor y2 = conv3d(x2, w2, Tensor(), 2, 2);
  CHECK(y2.shape() == Shape{3, 8, 3, 3});
}

TEST_CASE("conv_transpose3d inverts conv3d shape arithmetic") {
  Rng rng(10);
  for (std::int64_t n : {5, 8, 11}) {
    Tensor x = Tensor::randn({2, n, n, n}, rng);
    Tensor w = Tensor::randn({3, 2, 5, 5, 5}, rng, 0.1);
    Tensor y = conv3d(x, w, Tensor(), 2, 2);
    Tensor wt = Tensor::randn({3, 2, 5, 5, 5}, rng, 0.1);
    const std::int64_t out_pad = (n % 2 == 0) ? 1 : 0;
    Tensor z = conv_transpose3d(y, wt, Tensor(), 2, 2, out_pad);
    CHECK(z.size(1) == n);
    CHECK(z.size(2) == n);
    CHECK(z.size(3) == n);
  }
}

TEST_CASE("conv_transpose3d equals the adjoint of conv3d") {
  // <conv(x), y> == <x, conv_transpose(y)> when both share weights w.
  Rng rng(11);
  Tensor x = Tensor::randn({2, 6, 6, 6}, rng);
  Tensor w = Tensor::randn({3, 2, 3, 3, 3}, rng, 0.2);
  Tensor y = Tensor::randn({3, 3, 3, 3}, rng);
  Tensor cx = conv3d(x, w, Tensor(), 2, 1);
  CHECK(cx.shape() == Shape{3, 3, 3, 3});
  const double lhs = sum(cx * y).item();

  // Transposed op wants (Ci_t, Co_t, k, k, k) = (3, 2, ...): identical memory
  // layout to the conv weights, only the axis roles swap.
  Tensor ty =
      conv_transpose3d(y, Tensor::from_data({3, 2, 3, 3, 3}, w.data()), Tensor(), 2, 1, 1);
  CHECK(ty.shape() == Shape{2, 6, 6, 6});
  const double rhs = sum(ty * x).item();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("finite-difference gradients: conv ops") {
  Rng rng(12);
  {
    Tensor x = Tensor::randn({2, 4, 4, 4}, rng, 0.5, true);
    Tensor w = Tensor::randn({3, 2, 3, 3, 3}, rng, 0.3, true);
    Tensor b = Tensor::randn({3}, rng, 0.3, true);
    std::vector<Tensor> in{x, w, b};
    auto f = [](const std::vector<Tensor>& in) {
      Tensor y = conv3d(in[0], in[1], in[2], 2, 1);
      return sum(y * y);
    };
    CHECK(max_rel_grad_err(f, in) < kGradTol);
  }
  {
    Tensor x = Tensor::randn({3, 2, 2, 2}, rng, 0.5, true);
    Tensor w = Tensor::randn({3, 2, 3, 3, 3}, rng, 0.3, true);
    Tensor b = Tensor::randn({2}, rng, 0.3, true);
    std::vector<Tensor> in{x, w, b};
    auto f = [](const std::vector<Tensor>& in) {
      Tensor y = conv_transpose3d(in[0], in[1], in[2], 2, 1, 1);
      return sum(y * y);
    };
    CHECK(max_rel_grad_err(f, in) < kGradTol);
  }
}

TEST_CASE("gather, layout permutations and stacking") {
  Rng rng(13);
  Tensor g = Tensor::randn({2, 3, 3, 3}, rng, 1.0, true);

  Tensor rows = channels_to_rows(g);
  CHECK(rows.shape() == Shape{27, 2});
  CHECK(rows.data()[5 * 2 + 1] == g.data()[27 + 5]);
  Tensor back = rows_to_channels(rows, 3, 3, 3);
  CHECK(back.data() == g.data());

  // Center tap of a k=3 valid scan over a 3-edge grid selects the center cell.
  Tensor center = gather_taps(g, {1, 1, 1}, 3, 1, 0, false);
  CHECK(center.shape() == Shape{1, 2});
  CHECK(center.data()[0] == g.data()[(1 * 3 + 1) * 3 + 1]);

  // Origin padding: corner tap with padding 1 hits out-of-range cells -> zeros.
  Tensor padded = gather_taps(g, {0, 0, 0}, 3, 1, 1, true);
  CHECK(padded.shape() == Shape{27, 2});
  CHECK(padded.data()[0] == 0.0);
  CHECK(padded.data()[1] == 0.0);

  std::vector<Tensor> in{g};
  auto f1 = [](const std::vector<Tensor>& in) {
    Tensor r = gather_taps(in[0], {0, 1, 2}, 3, 1, 1, true);
    return sum(r * r);
  };
  CHECK(max_rel_grad_err(f1, in) < kGradTol);
  auto f2 = [](const std::vector<Tensor>& in) {
    Tensor r = channels_to_rows(in[0]);
    Tensor s = rows_to_channels(r * 2.0, 3, 3, 3);
    return sum(s * in[0]);
  };
  CHECK(max_rel_grad_err(f2, in) < kGradTol);

  Tensor c0 = Tensor::randn({8, 1}, rng, 1.0, true);
  Tensor c1 = Tensor::randn({8, 1}, rng, 1.0, true);
  std::vector<Tensor> cs{c0, c1};
  auto f3 = [](const std::vector<Tensor>& in) {
    Tensor s = stack_channels({in[0], in[1]}, 2, 2, 2);
    return sum(s * s);
  };
  CHECK(max_rel_grad_err(f3, cs) < kGradTol);
  Tensor stacked = stack_channels({c0, c1}, 2, 2, 2);
  CHECK(stacked.shape() == Shape{2, 2, 2, 2});
  CHECK(stacked.data()[3] == c0.data()[3]);
  CHECK(stacked.data()[8 + 3] == c1.data()[3]);
}

TEST_CASE("trilinear resize") {
  // Linear ramp is reproduced exactly at any resolution (align corners).
  std::vector<double> ramp(4 * 4 * 4);
  for (int z = 0; z < 4; ++z) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) ramp[(z * 4 + y) * 4 + x] = 2.0 * x + 0.5 * y - z;
    }
  }
  Tensor t = Tensor::from_data({1, 4, 4, 4}, ramp);
  Tensor up = trilinear_resize(t, 7, 7, 7);
  CHECK(up.shape() == Shape{1, 7, 7, 7});
  const auto& ud = up.data();
  for (int z = 0; z < 7; ++z) {
    for (int y = 0; y < 7; ++y) {
      for (int x = 0; x < 7; ++x) {
        const double fx = x * 3.0 / 6.0, fy = y * 3.0 / 6.0, fz = z * 3.0 / 6.0;
        CHECK(std::abs(ud[(z * 7 + y) * 7 + x] - (2.0 * fx + 0.5 * fy - fz)) < 1e-12);
      }
    }
  }
  // Corners map to corners.
  Tensor down = trilinear_resize(t, 2, 2, 2);
  CHECK(down.data()[0] == ramp[0]);
  CHECK(down.data()[7] == ramp[63]);
}

TEST_CASE("adam reaches a quadratic minimum and matches reference first step") {
  // First step of Adam moves each coordinate by exactly lr (bias-corrected).
  Tensor p = Tensor::from_data({2}, {1.0, -3.0}, true);
  AdamConfig cfg;
  cfg.lr = 0.05;
  cfg.eps = 1e-8;
  Adam opt({p}, cfg);
  Tensor loss = sum((p - Tensor::from_data({2}, {2.0, 1.0})) *
                    (p - Tensor::from_data({2}, {2.0, 1.0})));
  opt.zero_grad();
  loss.backward();
  opt.step();
  CHECK(p.data()[0] == doctest::Approx(1.0 + 0.05).epsilon(1e-6));
  CHECK(p.data()[1] == doctest::Approx(-3.0 + 0.05).epsilon(1e-6));
  CHECK(opt.steps() == 1);

  for (int i = 0; i < 3000; ++i) {
    opt.zero_grad();
    Tensor target = Tensor::from_data({2}, {2.0, 1.0});
    Tensor l = sum((p - target) * (p - target));
    l.backward();
    opt.step();
  }
  CHECK(std::abs(p.data()[0] - 2.0) < 1e-2);
  CHECK(std::abs(p.data()[1] - 1.0) < 1e-2);
}
