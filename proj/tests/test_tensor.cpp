#include "tensor.hpp"

#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"

using namespace preffend;

namespace {

constexpr unsigned long long kSeed = 20240817;

Tensor random_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                     double lo = -2.0, double hi = 2.0) {
  return Tensor::uniform(rows, cols, lo, hi, rng);
}

// Random-projection scalarization: full Jacobian coverage through a fixed
// random weighting of the op output.
std::function<Tensor(const Tensor&)> project(std::function<Tensor(const Tensor&)> op,
                                             const Tensor& weights) {
  return [op = std::move(op), weights](const Tensor& x) {
    return sum_all(mul(op(x), weights));
  };
}

}  // namespace

TEST_CASE("forward op examples") {
  Tensor relu_in = Tensor::column({-1.0, 0.0, 2.0});
  Tensor relu_out = relu(relu_in);
  CHECK(relu_out.values()[0] == 0.0);
  CHECK(relu_out.values()[1] == 0.0);
  CHECK(relu_out.values()[2] == 2.0);

  CHECK(sigmoid(Tensor::scalar(0.0)).value() == doctest::Approx(0.5).epsilon(1e-15));

  Tensor u = Tensor::column({1.0, 0.0});
  Tensor v = Tensor::column({0.0, 1.0});
  CHECK(cosine(u, v).value() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("matmul and transpose basics") {
  Tensor a = Tensor::from_values(2, 3, {1, 2, 3, 4, 5, 6});
  Tensor b = Tensor::from_values(3, 2, {7, 8, 9, 10, 11, 12});
  Tensor c = matmul(a, b);
  CHECK(c.at(0, 0) == 58.0);
  CHECK(c.at(0, 1) == 64.0);
  CHECK(c.at(1, 0) == 139.0);
  CHECK(c.at(1, 1) == 154.0);

  Tensor t = transpose(a);
  CHECK(t.rows() == 3);
  CHECK(t.at(0, 1) == 4.0);

  CHECK_THROWS_WITH_AS(matmul(a, a), doctest::Contains("[2x3]"), std::invalid_argument);
  CHECK_THROWS_AS(add(a, b), std::invalid_argument);
}

TEST_CASE("reductions and softmax") {
  Tensor m = Tensor::from_values(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(row_sum(m).values()[0] == 6.0);
  CHECK(row_sum(m).values()[1] == 15.0);
  CHECK(col_sum(m).values()[2] == 9.0);
  CHECK(sum_all(m).value() == 21.0);

  Tensor s = softmax_rows(Tensor::row({0.0, 0.0, 0.0, 0.0}));
  for (double v : s.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("log rejects non-positive input") {
  CHECK_THROWS_AS(log(Tensor::column({1.0, 0.0})), std::domain_error);
  CHECK_THROWS_AS(log(Tensor::column({-1.0})), std::domain_error);
}

TEST_CASE("backward examples") {
  SUBCASE("d(x*x)/dx = 2x") {
    Tensor x = Tensor::scalar(3.0);
    x.set_trainable(true);
    Tape tape;
    Tensor loss = mul(x, x);
    tape.backward(loss);
    CHECK(x.grad()[0] == doctest::Approx(6.0).epsilon(1e-15));
  }
  SUBCASE("sigmoid'(0) = 0.25") {
    Tensor x = Tensor::scalar(0.0);
    x.set_trainable(true);
    Tape tape;
    Tensor loss = sigmoid(x);
    tape.backward(loss);
    CHECK(x.grad()[0] == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("relu'(-2) = 0") {
    Tensor x = Tensor::scalar(-2.0);
    x.set_trainable(true);
    Tape tape;
    Tensor loss = relu(x);
    tape.backward(loss);
    CHECK(x.grad()[0] == 0.0);
  }
}

TEST_CASE("backward rejects non-scalar loss") {
  Tensor x = Tensor::column({1.0, 2.0});
  x.set_trainable(true);
  Tape tape;
  Tensor y = relu(x);
  CHECK_THROWS_AS(tape.backward(y), std::invalid_argument);
}

TEST_CASE("gradients accumulate over shared subexpressions") {
  std::mt19937_64 rng(kSeed);
  Tensor a = random_tensor(3, 3, rng);
  Tensor b = random_tensor(3, 3, rng);
  Tensor x = random_tensor(3, 3, rng);

  std::vector<double> combined;
  {
    Tensor xc = x.clone(true);
    Tape tape;
    Tensor loss = sum_all(add(mul(xc, a), mul(xc, b)));
    tape.backward(loss);
    auto g = xc.grad();
    combined.assign(g.begin(), g.end());
  }
  std::vector<double> branch_a, branch_b;
  {
    Tensor xc = x.clone(true);
    Tape tape;
    Tensor loss = sum_all(mul(xc, a));
    tape.backward(loss);
    auto g = xc.grad();
    branch_a.assign(g.begin(), g.end());
  }
  {
    Tensor xc = x.clone(true);
    Tape tape;
    Tensor loss = sum_all(mul(xc, b));
    tape.backward(loss);
    auto g = xc.grad();
    branch_b.assign(g.begin(), g.end());
  }
  for (std::size_t i = 0; i < combined.size(); ++i) {
    CHECK(combined[i] == doctest::Approx(branch_a[i] + branch_b[i]).epsilon(1e-12));
  }
}

TEST_CASE("gather_rows accumulates over repeated indices") {
  Tensor m = Tensor::from_values(3, 2, {1, 2, 3, 4, 5, 6}, true);
  Tape tape;
  Tensor g = gather_rows(m, {1, 1, 2});
  CHECK(g.at(0, 0) == 3.0);
  CHECK(g.at(2, 1) == 6.0);
  Tensor loss = sum_all(g);
  tape.backward(loss);
  CHECK(m.grad()[0] == 0.0);  // row 0 unused
  CHECK(m.grad()[2] == 2.0);  // row 1 gathered twice
  CHECK(m.grad()[4] == 1.0);
  CHECK_THROWS_AS(gather_rows(m, {3}), std::invalid_argument);
}

TEST_CASE("tensors outside the loss path stay untouched") {
  Tensor a = Tensor::scalar(2.0);
  a.set_trainable(true);
  Tensor b = Tensor::scalar(5.0);
  b.set_trainable(true);
  Tape tape;
  Tensor unused = mul(a, a);
  Tensor loss = mul(b, b);
  tape.backward(loss);
  CHECK(b.grad()[0] == doctest::Approx(10.0));
  CHECK_FALSE(a.has_grad());
  CHECK_FALSE(unused.has_grad());
}

TEST_CASE("deterministic forward and gradients for a fixed seed") {
  auto run = [](std::vector<double>& forward_out, std::vector<double>& grad_out) {
    std::mt19937_64 rng(kSeed);
    Tensor w = Tensor::uniform(4, 4, -1.0, 1.0, rng, true);
    Tensor x = Tensor::uniform(4, 1, -1.0, 1.0, rng);
    Tape tape;
    Tensor y = tanh(matmul(w, x));
    Tensor loss = sum_all(mul(y, y));
    tape.backward(loss);
    auto fv = y.values();
    forward_out.assign(fv.begin(), fv.end());
    auto gv = w.grad();
    grad_out.assign(gv.begin(), gv.end());
  };
  std::vector<double> f1, g1, f2, g2;
  run(f1, g1);
  run(f2, g2);
  CHECK(std::memcmp(f1.data(), f2.data(), f1.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(g1.data(), g2.data(), g1.size() * sizeof(double)) == 0);
}

TEST_CASE("grad_check on simple functions") {
  SUBCASE("quadratic is exact to central-difference accuracy") {
    auto fn = [](const Tensor& x) { return mul(x, x); };
    GradCheckResult r = grad_check(fn, Tensor::scalar(3.0), 1e-5);
    CHECK(r.max_rel_error < 1e-6);
  }
  SUBCASE("softmax then log of first entry") {
    std::mt19937_64 rng(kSeed);
    Tensor point = random_tensor(1, 4, rng);
    Tensor pick_first = Tensor::row({1.0, 0.0, 0.0, 0.0});
    auto fn = [pick_first](const Tensor& x) {
      return log(sum_all(mul(softmax_rows(x), pick_first)));
    };
    GradCheckResult r = grad_check(fn, point, 1e-5);
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("relu kink coordinates are skippable") {
    Tensor point = Tensor::column({0.0, 1.0, -1.0});
    std::vector<bool> skip = {true, false, false};
    auto fn = [](const Tensor& x) { return sum_all(relu(x)); };
    GradCheckResult r = grad_check(fn, point, 1e-5, &skip);
    CHECK(r.max_rel_error < 1e-8);
  }
  SUBCASE("epsilon must be positive") {
    auto fn = [](const Tensor& x) { return sum_all(x); };
    CHECK_THROWS_AS(grad_check(fn, Tensor::scalar(1.0), 0.0), std::invalid_argument);
  }
}

// Analytic gradients match central differences at 100 seeded random points
// per operator; kink coordinates excluded for relu and clamp.
TEST_CASE("per-operator gradient sweep") {
  constexpr int kTrials = 100;
  constexpr double kEps = 1e-5;
  constexpr double kTol = 1e-4;

  auto sweep = [&](const char* name, auto&& make) {
    std::mt19937_64 rng(kSeed ^ std::hash<std::string>{}(name));
    double worst = 0.0;
    for (int t = 0; t < kTrials; ++t) {
      worst = std::max(worst, make(rng));
    }
    INFO(name);
    CHECK(worst < kTol);
  };

  sweep("matmul_lhs", [&](std::mt19937_64& rng) {
    Tensor b = random_tensor(4, 3, rng);
    Tensor w = random_tensor(2, 3, rng);
    return grad_check(project([b](const Tensor& x) { return matmul(x, b); }, w),
                      random_tensor(2, 4, rng), kEps)
        .max_rel_error;
  });
  sweep("matmul_rhs", [&](std::mt19937_64& rng) {
    Tensor a = random_tensor(2, 4, rng);
    Tensor w = random_tensor(2, 3, rng);
    return grad_check(project([a](const Tensor& x) { return matmul(a, x); }, w),
                      random_tensor(4, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("transpose", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(3, 2, rng);
    return grad_check(project([](const Tensor& x) { return transpose(x); }, w),
                      random_tensor(2, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("add", [&](std::mt19937_64& rng) {
    Tensor b = random_tensor(3, 3, rng);
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([b](const Tensor& x) { return add(x, b); }, w),
                      random_tensor(3, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("sub", [&](std::mt19937_64& rng) {
    Tensor b = random_tensor(3, 3, rng);
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([b](const Tensor& x) { return sub(b, x); }, w),
                      random_tensor(3, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("mul", [&](std::mt19937_64& rng) {
    Tensor b = random_tensor(3, 3, rng);
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([b](const Tensor& x) { return mul(x, b); }, w),
                      random_tensor(3, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("divide_num", [&](std::mt19937_64& rng) {
    Tensor b = random_tensor(3, 3, rng, 0.5, 2.0);
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([b](const Tensor& x) { return divide(x, b); }, w),
                      random_tensor(3, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("divide_den", [&](std::mt19937_64& rng) {
    Tensor a = random_tensor(3, 3, rng);
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([a](const Tensor& x) { return divide(a, x); }, w),
                      random_tensor(3, 3, rng, 0.5, 2.0), kEps)
        .max_rel_error;
  });
  sweep("scale", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([](const Tensor& x) { return scale(x, -1.7); }, w),
                      random_tensor(3, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("relu", [&](std::mt19937_64& rng) {
    Tensor point = random_tensor(3, 3, rng);
    std::vector<bool> skip(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
      skip[i] = std::fabs(point.values()[i]) < 1e-3;  // kink exclusion
    }
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([](const Tensor& x) { return relu(x); }, w), point,
                      kEps, &skip)
        .max_rel_error;
  });
  sweep("sigmoid", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([](const Tensor& x) { return sigmoid(x); }, w),
                      random_tensor(3, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("tanh", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([](const Tensor& x) { return tanh(x); }, w),
                      random_tensor(3, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("log", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([](const Tensor& x) { return log(x); }, w),
                      random_tensor(3, 3, rng, 0.5, 3.0), kEps)
        .max_rel_error;
  });
  sweep("sqrt", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([](const Tensor& x) { return sqrt(x); }, w),
                      random_tensor(3, 3, rng, 0.5, 3.0), kEps)
        .max_rel_error;
  });
  sweep("clamp", [&](std::mt19937_64& rng) {
    Tensor point = random_tensor(3, 3, rng, 0.0, 1.0);
    std::vector<bool> skip(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
      const double v = point.values()[i];
      skip[i] = std::fabs(v - 0.25) < 1e-3 || std::fabs(v - 0.75) < 1e-3;
    }
    Tensor w = random_tensor(3, 3, rng);
    return grad_check(project([](const Tensor& x) { return clamp(x, 0.25, 0.75); }, w),
                      point, kEps, &skip)
        .max_rel_error;
  });
  sweep("softmax_rows", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(2, 4, rng);
    return grad_check(project([](const Tensor& x) { return softmax_rows(x); }, w),
                      random_tensor(2, 4, rng), kEps)
        .max_rel_error;
  });
  sweep("row_sum", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(3, 1, rng);
    return grad_check(project([](const Tensor& x) { return row_sum(x); }, w),
                      random_tensor(3, 4, rng), kEps)
        .max_rel_error;
  });
  sweep("col_sum", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(1, 4, rng);
    return grad_check(project([](const Tensor& x) { return col_sum(x); }, w),
                      random_tensor(3, 4, rng), kEps)
        .max_rel_error;
  });
  sweep("sum_all", [&](std::mt19937_64& rng) {
    return grad_check([](const Tensor& x) { return sum_all(x); },
                      random_tensor(3, 4, rng), kEps)
        .max_rel_error;
  });
  sweep("concat_rows", [&](std::mt19937_64& rng) {
    Tensor other = random_tensor(2, 3, rng);
    Tensor w = random_tensor(5, 3, rng);
    return grad_check(
               project([other](const Tensor& x) { return concat_rows({x, other}); }, w),
               random_tensor(3, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("concat_cols", [&](std::mt19937_64& rng) {
    Tensor other = random_tensor(3, 2, rng);
    Tensor w = random_tensor(3, 5, rng);
    return grad_check(
               project([other](const Tensor& x) { return concat_cols({other, x}); }, w),
               random_tensor(3, 3, rng), kEps)
        .max_rel_error;
  });
  sweep("cosine_lhs", [&](std::mt19937_64& rng) {
    Tensor v = random_tensor(4, 1, rng, 0.2, 1.5);
    return grad_check([v](const Tensor& x) { return cosine(x, v); },
                      random_tensor(4, 1, rng, 0.2, 1.5), kEps)
        .max_rel_error;
  });
  sweep("cosine_rhs", [&](std::mt19937_64& rng) {
    Tensor u = random_tensor(4, 1, rng, 0.2, 1.5);
    return grad_check([u](const Tensor& x) { return cosine(u, x); },
                      random_tensor(4, 1, rng, 0.2, 1.5), kEps)
        .max_rel_error;
  });
  sweep("gather_rows", [&](std::mt19937_64& rng) {
    Tensor w = random_tensor(3, 2, rng);
    std::vector<std::size_t> idx = {2, 0, 2};
    return grad_check(
               project([idx](const Tensor& x) { return gather_rows(x, idx); }, w),
               random_tensor(4, 2, rng), kEps)
        .max_rel_error;
  });
}

TEST_CASE("concat shape checks") {
  Tensor a = Tensor::zeros(2, 3);
  Tensor b = Tensor::zeros(2, 4);
  CHECK_THROWS_AS(concat_rows({a, b}), std::invalid_argument);
  CHECK_THROWS_AS(concat_cols({a, Tensor::zeros(3, 4)}), std::invalid_argument);
  Tensor c = concat_cols({a, b});
  CHECK(c.cols() == 7);
}
