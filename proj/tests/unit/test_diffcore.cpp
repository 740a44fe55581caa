#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pulseforge/diffcore/adam.hpp"
#include "pulseforge/diffcore/ops.hpp"

using namespace pulseforge;
using namespace pulseforge::diffcore;
using oracles::fd_relative_error;
using oracles::random_tensor;

namespace {

// Reduces a non-scalar op output with fixed random weights (a plain sum can
// make gradients vanish identically, e.g. d(sum bn)/d gamma = sum xhat = 0).
Var reduce_generic(Var out) {
  if (out.value().is_scalar()) return out;
  Tensor w(out.value().shape);
  util::Rng wrng(0x5eed + w.size());
  for (auto& v : w.v) v = wrng.uniform(0.25, 1.75);
  return weighted_sum(out, w);
}

// Checks d(reduced op output)/d(input `wrt`) against finite differences;
// the build function is re-run from scratch on every evaluation. By
// convention build adds the inputs as the first tape nodes, so node `wrt`
// is the leaf whose gradient is read back.
double check_grad(const std::function<Var(Tape&, const std::vector<Tensor>&)>& build,
                  const std::vector<Tensor>& inputs, std::size_t wrt, double h = 1e-4) {
  Tape tape;
  Var out = build(tape, inputs);
  Var loss = reduce_generic(out);
  tape.backward(loss);
  Var leaf{&tape, static_cast<int>(wrt)};
  Tensor g = tape.grad(leaf);

  auto f = [&](const Tensor& x) {
    std::vector<Tensor> in2 = inputs;
    in2[wrt] = x;
    Tape t2;
    return reduce_generic(build(t2, in2)).value().scalar_value();
  };
  return fd_relative_error(f, inputs[wrt], g, h);
}

std::function<Var(Tape&, const std::vector<Tensor>&)> leaves_then(
    const std::function<Var(Tape&, const std::vector<Var>&)>& op) {
  return [op](Tape& t, const std::vector<Tensor>& inputs) {
    std::vector<Var> vars;
    vars.reserve(inputs.size());
    for (const auto& in : inputs) vars.push_back(t.param(in));
    return op(t, vars);
  };
}

}  // namespace

TEST_CASE("elementwise forward values") {
  Tape t;
  Var x = t.input(Tensor({3}, {0.0, -1.0, 2.0}));
  CHECK(vtanh(x).value()[0] == doctest::Approx(0.0));
  CHECK(leaky_relu(x).value()[1] == doctest::Approx(-0.01));
  CHECK(leaky_relu(x).value()[2] == doctest::Approx(2.0));
  CHECK(relu(x).value()[1] == doctest::Approx(0.0));
  CHECK(vexp(x).value()[2] == doctest::Approx(std::exp(2.0)));
  CHECK(scale_shift(x, 2.0, 1.0).value()[2] == doctest::Approx(5.0));
}

TEST_CASE("tanh gradient at zero is one") {
  Tape t;
  Var x = t.param(Tensor({1}, {0.0}));
  Var y = vtanh(x);
  t.backward(y);
  CHECK(t.grad(x)[0] == doctest::Approx(1.0));
}

TEST_CASE("mse value and gradient formula") {
  Tape t;
  Var a = t.param(Tensor({2}, {1.0, 3.0}));
  Var b = t.input(Tensor({2}, {0.0, 1.0}));
  Var l = mse(a, b);
  CHECK(l.value().scalar_value() == doctest::Approx((1.0 + 4.0) / 2.0));
  t.backward(l);
  // d/da mse = 2 (a - b) / n
  CHECK(t.grad(a)[0] == doctest::Approx(1.0));
  CHECK(t.grad(a)[1] == doctest::Approx(2.0));
}

TEST_CASE("conv1d identity kernel leaves the signal unchanged") {
  Tape t;
  Tensor x({1, 1, 8}, {1, 2, 3, 4, 5, 6, 7, 8});
  Var xv = t.input(x);
  Var w = t.input(Tensor({1, 1, 3}, {1, 0, 0}));
  Var b = t.input(Tensor({1}, {0.0}));
  Var y = conv1d(xv, w, b, 1, 0, 2);  // anchor-left same padding
  REQUIRE(y.shape() == std::vector<int>{1, 1, 8});
  for (int i = 0; i < 8; ++i) CHECK(y.value()[i] == doctest::Approx(x[i]));
}

TEST_CASE("batchnorm train mode normalizes per channel") {
  util::Rng rng(11);
  Tensor x = random_tensor({4, 3, 16}, rng, -3.0, 5.0);
  Tensor rm({3}), rv({3});
  for (auto& v : rv.v) v = 1.0;
  Tensor gamma({3}), beta({3});
  for (auto& v : gamma.v) v = 1.0;

  Tape t;
  Var y = batchnorm1d(t.input(x), t.input(gamma), t.input(beta), rm, rv, true);
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0, var = 0.0;
    for (int b = 0; b < 4; ++b)
      for (int l = 0; l < 16; ++l) mean += y.value()[(b * 3 + c) * 16 + l];
    mean /= 64.0;
    for (int b = 0; b < 4; ++b)
      for (int l = 0; l < 16; ++l) {
        double d = y.value()[(b * 3 + c) * 16 + l] - mean;
        var += d * d;
      }
    var /= 64.0;
    CHECK(std::abs(mean) < 1e-5);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("batchnorm eval mode is frozen and pure") {
  util::Rng rng(12);
  Tensor x = random_tensor({2, 3, 8}, rng);
  Tensor rm({3}, {0.5, -0.5, 0.0}), rv({3}, {2.0, 1.0, 0.25});
  Tensor rm2 = rm, rv2 = rv;
  Tensor gamma({3}, {1.0, 2.0, 3.0}), beta({3}, {0.0, 1.0, -1.0});

  Tape t;
  Var y1 = batchnorm1d(t.input(x), t.input(gamma), t.input(beta), rm, rv, false);
  Var y2 = batchnorm1d(t.input(x), t.input(gamma), t.input(beta), rm, rv, false);
  for (std::size_t i = 0; i < y1.value().size(); ++i) CHECK(y1.value()[i] == y2.value()[i]);
  for (int c = 0; c < 3; ++c) {
    CHECK(rm[c] == rm2[c]);  // running stats untouched in eval
    CHECK(rv[c] == rv2[c]);
  }
}

TEST_CASE("gradient suite: every op kind vs central finite differences") {
  util::Rng rng(1234);
  const double tol = 1e-4;
  int instances = 20;

  for (int rep = 0; rep < instances; ++rep) {
    // elementwise ops (inputs kept away from activation kinks)
    {
      Tensor x = random_tensor({2, 5}, rng, 0.1, 1.5);
      Tensor x2 = random_tensor({2, 5}, rng, -1.5, -0.1);
      auto on = [&](auto opfn) {
        return leaves_then([opfn](Tape&, const std::vector<Var>& v) { return opfn(v[0]); });
      };
      CHECK(check_grad(on([](Var v) { return vtanh(v); }), {x}, 0) < tol);
      CHECK(check_grad(on([](Var v) { return vexp(v); }), {x}, 0) < tol);
      CHECK(check_grad(on([](Var v) { return leaky_relu(v); }), {x}, 0) < tol);
      CHECK(check_grad(on([](Var v) { return leaky_relu(v); }), {x2}, 0) < tol);
      CHECK(check_grad(on([](Var v) { return relu(v); }), {x}, 0) < tol);
      CHECK(check_grad(on([](Var v) { return scale_shift(v, -2.5, 0.3); }), {x}, 0) < tol);
      CHECK(check_grad(on([](Var v) { return reshape(v, {10}); }), {x}, 0) < tol);
      CHECK(check_grad(on([](Var v) { return slice_cols(v, 1, 4); }), {x}, 0) < tol);
      CHECK(check_grad(on([](Var v) { return sum(v); }), {x}, 0) < tol);
    }
    {
      Tensor a = random_tensor({3, 4}, rng), b = random_tensor({3, 4}, rng);
      auto both = [&](auto opfn) {
        return leaves_then(
            [opfn](Tape&, const std::vector<Var>& v) { return opfn(v[0], v[1]); });
      };
      CHECK(check_grad(both([](Var x, Var y) { return add(x, y); }), {a, b}, 0) < tol);
      CHECK(check_grad(both([](Var x, Var y) { return mul(x, y); }), {a, b}, 1) < tol);
      CHECK(check_grad(both([](Var x, Var y) { return mse(x, y); }), {a, b}, 0) < tol);
      CHECK(check_grad(both([](Var x, Var y) { return mse(x, y); }), {a, b}, 1) < tol);
    }
    {
      Tensor w({8});
      for (auto& v : w.v) v = rng.uniform(-1.0, 1.0);
      Tensor x = random_tensor({8}, rng);
      auto build = leaves_then(
          [w](Tape&, const std::vector<Var>& v) { return weighted_sum(v[0], w); });
      CHECK(check_grad(build, {x}, 0) < tol);
    }
    {
      std::vector<Tensor> rows = {random_tensor({4}, rng), random_tensor({4}, rng),
                                  random_tensor({4}, rng)};
      auto build = leaves_then([](Tape&, const std::vector<Var>& v) {
        return concat_rows({v[0], v[1], v[2]});
      });
      CHECK(check_grad(build, rows, rep % 3) < tol);
    }
    // affine
    {
      Tensor x = random_tensor({3, 4}, rng), w = random_tensor({4, 5}, rng),
             b = random_tensor({5}, rng);
      auto build = leaves_then(
          [](Tape&, const std::vector<Var>& v) { return affine(v[0], v[1], v[2]); });
      CHECK(check_grad(build, {x, w, b}, 0) < tol);
      CHECK(check_grad(build, {x, w, b}, 1) < tol);
      CHECK(check_grad(build, {x, w, b}, 2) < tol);
    }
    // conv1d over stride/pad combinations
    {
      int stride = 1 + rep % 2;
      int pad = rep % 3;
      Tensor x = random_tensor({2, 3, 12}, rng), w = random_tensor({4, 3, 3}, rng),
             b = random_tensor({4}, rng);
      auto build = leaves_then([stride, pad](Tape&, const std::vector<Var>& v) {
        return conv1d(v[0], v[1], v[2], stride, pad, pad);
      });
      CHECK(check_grad(build, {x, w, b}, 0) < tol);
      CHECK(check_grad(build, {x, w, b}, 1) < tol);
      CHECK(check_grad(build, {x, w, b}, 2) < tol);
    }
    // transposed conv
    {
      int k = 3 + 2 * (rep % 2);
      int pad = (k - 1) / 2;
      Tensor x = random_tensor({2, 3, 6}, rng), w = random_tensor({3, 2, k}, rng),
             b = random_tensor({2}, rng);
      auto build = leaves_then([pad](Tape&, const std::vector<Var>& v) {
        return conv1d_transpose(v[0], v[1], v[2], 2, pad, 1);
      });
      CHECK(check_grad(build, {x, w, b}, 0) < tol);
      CHECK(check_grad(build, {x, w, b}, 1) < tol);
      CHECK(check_grad(build, {x, w, b}, 2) < tol);
    }
    // batchnorm, train and eval
    {
      Tensor x = random_tensor({3, 2, 5}, rng, -2.0, 2.0);
      Tensor gamma = random_tensor({2}, rng, 0.5, 1.5);
      Tensor beta = random_tensor({2}, rng);
      for (bool train : {true, false}) {
        auto build = leaves_then([train](Tape&, const std::vector<Var>& v) {
          // fresh buffers per evaluation keep finite differences consistent
          Tensor rm({2}), rv({2});
          rv[0] = 1.3;
          rv[1] = 0.7;
          rm[0] = 0.2;
          rm[1] = -0.4;
          return batchnorm1d(v[0], v[1], v[2], rm, rv, train);
        });
        CHECK(check_grad(build, {x, gamma, beta}, 0) < tol);
        CHECK(check_grad(build, {x, gamma, beta}, 1) < tol);
        CHECK(check_grad(build, {x, gamma, beta}, 2) < tol);
      }
    }
  }
}

TEST_CASE("tape replay determinism") {
  util::Rng rng(77);
  Tensor x = random_tensor({2, 3, 8}, rng);
  Tensor w = random_tensor({2, 3, 3}, rng);
  Tensor b = random_tensor({2}, rng);

  auto run = [&]() {
    Tape t;
    Var xv = t.param(x), wv = t.param(w), bv = t.param(b);
    Var y = sum(vtanh(conv1d(xv, wv, bv, 2, 1, 1)));
    t.backward(y);
    std::vector<double> out{y.value().scalar_value()};
    for (double g : t.grad(wv).v) out.push_back(g);
    return out;
  };
  auto r1 = run(), r2 = run();
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == r2[i]);
}

TEST_CASE("backward requires scalar loss") {
  Tape t;
  Var x = t.param(Tensor({3}, {1.0, 2.0, 3.0}));
  CHECK_THROWS_AS(t.backward(x), ShapeError);
}

TEST_CASE("shape errors") {
  Tape t;
  Var a = t.input(Tensor({2}, {1, 2}));
  Var b = t.input(Tensor({3}, {1, 2, 3}));
  CHECK_THROWS_AS(add(a, b), ShapeError);
  CHECK_THROWS_AS(reshape(a, {5}), ShapeError);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  AdamState s(0.1);
  Tensor p({3}, {1.0, -2.0, 0.5});
  s.init({p});
  Tensor g({3});
  Tensor before = p;
  adam_step(s, {&p}, {&g});
  for (int i = 0; i < 3; ++i) CHECK(p[i] == before[i]);
  CHECK(s.step_count == 1);
}

TEST_CASE("adam: first step moves by about -lr*sign(g)") {
  AdamState s(0.05);
  Tensor p({2}, {0.0, 0.0});
  s.init({p});
  Tensor g({2}, {3.0, -0.01});
  adam_step(s, {&p}, {&g});
  CHECK(p[0] == doctest::Approx(-0.05).epsilon(1e-4));
  CHECK(p[1] == doctest::Approx(0.05).epsilon(1e-2));
}

TEST_CASE("adam: converges on a scalar quadratic") {
  AdamState s(0.05);
  Tensor w({1}, {0.0});
  s.init({w});
  for (int i = 0; i < 2000; ++i) {
    Tensor g({1}, {2.0 * (w[0] - 3.0)});
    adam_step(s, {&w}, {&g});
  }
  CHECK(std::abs(w[0] - 3.0) < 1e-3);
}

TEST_CASE("adam: shape mismatch throws") {
  AdamState s;
  Tensor p({2});
  s.init({p});
  Tensor g({3});
  CHECK_THROWS_AS(adam_step(s, {&p}, {&g}), ShapeError);
}
