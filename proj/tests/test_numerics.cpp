#include <cmath>
#include <random>

#include "doctest.h"
#include "hssas/gradcheck.hpp"
#include "hssas/tape.hpp"

using namespace hssas;

namespace {

Matrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Param random_param(const std::string& name, Index r, Index c, std::mt19937_64& rng) {
  Param p(name, {r, c});
  p.value.matrix() = random_matrix(r, c, rng);
  return p;
}

}  // namespace

TEST_CASE("tensor shape bookkeeping") {
  Tensor t({2, 3});
  CHECK(t.size() == 6);
  CHECK(t.rank() == 2);
  CHECK(Tensor::scalar(4.0).size() == 1);
  CHECK_THROWS_AS(Tensor({2, 0}), DimensionError);
  CHECK_THROWS_AS(Tensor({2}, {1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("matmul examples") {
  Tape tape;
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  CHECK(matmul(tape.constant(Matrix::Identity(2, 2)), tape.constant(a)).value() == a);

  Matrix row(1, 2), col(2, 1);
  row << 1, 2;
  col << 3, 4;
  CHECK(matmul(tape.constant(row), tape.constant(col)).scalar() == 11.0);

  std::mt19937_64 rng(3);
  const Matrix x = random_matrix(3, 4, rng);
  const Matrix y = random_matrix(4, 2, rng);
  const Matrix got = matmul(tape.constant(x), tape.constant(y)).value();
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (Index k = 0; k < 4; ++k) acc += x(i, k) * y(k, j);
      CHECK(std::abs(got(i, j) - acc) < 1e-12);
    }
  }
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Tape tape;
  try {
    matmul(tape.constant(Matrix::Zero(2, 3)), tape.constant(Matrix::Zero(2, 3)));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string what = e.what();
    CHECK(what.find("2x3 * 2x3") != std::string::npos);
  }
}

TEST_CASE("matmul is associative") {
  std::mt19937_64 rng(11);
  Tape tape;
  for (int trial = 0; trial < 20; ++trial) {
    const Var a = tape.constant(random_matrix(3, 4, rng));
    const Var b = tape.constant(random_matrix(4, 2, rng));
    const Var c = tape.constant(random_matrix(2, 5, rng));
    CHECK((matmul(matmul(a, b), c).value() - matmul(a, matmul(b, c)).value()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("activations") {
  CHECK(stable_sigmoid(0.0) == 0.5);
  CHECK(std::tanh(0.0) == 0.0);
  const double tiny = stable_sigmoid(-745.0);
  CHECK(tiny > 0.0);
  CHECK(tiny <= 1e-300);
  CHECK(stable_sigmoid(745.0) == 1.0);
  for (double x : {-30.0, -5.0, -0.5, 0.25, 3.0, 20.0}) {
    CHECK(std::abs(stable_sigmoid(x) - 1.0 / (1.0 + std::exp(-x))) < 1e-15);
  }
  Tape tape;
  Matrix z = Matrix::Zero(1, 1);
  CHECK(sigmoid(tape.constant(z)).scalar() == 0.5);
  CHECK(tanh(tape.constant(z)).scalar() == 0.0);
}

TEST_CASE("softmax examples") {
  Tape tape;
  for (double c : {-700.0, 0.0, 3.5, 900.0}) {
    const auto y = softmax(tape.constant(Matrix::Constant(3, 1, c))).value();
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(y(i, 0) - 1.0 / 3.0) < 1e-15);
  }
  Matrix l(2, 1);
  l << 0.0, std::log(3.0);
  const auto y = softmax(tape.constant(l)).value();
  CHECK(std::abs(y(0, 0) - 0.25) < 1e-15);
  CHECK(std::abs(y(1, 0) - 0.75) < 1e-15);

  const std::uint8_t mask[] = {1, 0};
  const auto m = softmax(tape.constant(Matrix::Constant(2, 1, 5.0)), mask).value();
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 0) == 0.0);

  const std::uint8_t none[] = {0, 0};
  CHECK_THROWS_AS(softmax(tape.constant(Matrix::Zero(2, 1)), none), InvariantError);
}

TEST_CASE("softmax properties on random logits") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix logits = random_matrix(6, 1, rng) * 10.0;
    const Matrix y = masked_softmax(logits);
    CHECK(y.minCoeff() > 0.0);
    CHECK(std::abs(y.sum() - 1.0) < 1e-12);
    const Matrix shifted = masked_softmax((logits.array() + shift(rng)).matrix());
    CHECK((y - shifted).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("backward basics") {
  std::mt19937_64 rng(2);
  Param p = random_param("p", 2, 3, rng);
  {
    Tape tape;
    tape.backward(sum(tape.param(p)));
    CHECK(p.grad.matrix() == Matrix::Ones(2, 3));
  }
  Param q("q", {3});
  q.value.matrix() << 1, 2, 3;
  {
    Tape tape;
    const Var v = tape.param(q);
    tape.backward(sum(mul(v, v)));
    Matrix expect(3, 1);
    expect << 2, 4, 6;
    CHECK(q.grad.matrix() == expect);
  }
  Tape tape;
  CHECK_THROWS_AS(tape.backward(tape.param(q)), DimensionError);
}

TEST_CASE("gradient accumulation is linear over branches") {
  std::mt19937_64 rng(8);
  Param p = random_param("p", 3, 1, rng);
  const Matrix w1 = random_matrix(1, 3, rng);
  const Matrix w2 = random_matrix(1, 3, rng);
  auto branch1 = [&](Tape& t, Var v) { return sum(tanh(matmul(t.constant(w1), v))); };
  auto branch2 = [&](Tape& t, Var v) { return sum(sigmoid(matmul(t.constant(w2), mul(v, v)))); };

  Matrix g1, g2;
  {
    p.zero_grad();
    Tape t;
    t.backward(branch1(t, t.param(p)));
    g1 = p.grad.matrix();
  }
  {
    p.zero_grad();
    Tape t;
    t.backward(branch2(t, t.param(p)));
    g2 = p.grad.matrix();
  }
  p.zero_grad();
  Tape t;
  const Var v = t.param(p);
  t.backward(branch1(t, v) + branch2(t, v));
  CHECK((p.grad.matrix() - (g1 + g2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("finite_diff_check examples") {
  Param x("x", {});
  x.value[0] = 3.0;
  Param* xs[] = {&x};
  auto square = [&](Tape& t) {
    const Var v = t.param(x);
    return mul(v, v);
  };
  auto r = finite_diff_check(square, xs, 1e-5);
  CHECK(std::abs(x.grad[0] - 6.0) < 1e-12);
  CHECK(r.max_relative_error < 1e-8);

  x.value[0] = 0.0;
  r = finite_diff_check([&](Tape& t) { return sigmoid(t.param(x)); }, xs, 1e-5);
  CHECK(x.grad[0] == 0.25);
  CHECK(r.max_relative_error < 1e-8);

  CHECK_THROWS_AS(finite_diff_check([&](Tape& t) { return log_clamped(scale(t.param(x), 0.0), 0.0); }, xs, 1e-5),
                  InvariantError);
}

// Every differentiable primitive against central differences at 20 random points.
TEST_CASE("primitive gradients match finite differences") {
  std::mt19937_64 rng(21);
  for (int point = 0; point < 20; ++point) {
    Param a = random_param("a", 3, 4, rng);
    Param b = random_param("b", 4, 2, rng);
    Param c = random_param("c", 3, 1, rng);
    Param d = random_param("d", 3, 1, rng);
    Param s("s", {});
    s.value[0] = 0.7 + point * 0.01;
    const Matrix w = random_matrix(3, 1, rng);
    Param* elementwise[] = {&c, &d, &s};
    Param* composed[] = {&a, &b, &c, &d, &s};

    auto elem = [&](Tape& t) {
      const Var x = t.param(c), y = t.param(d);
      const Var v = add(mul(tanh(x), sigmoid(y)), sub(scale(x, 0.3), scale(y, t.param(s))));
      const Var probs = sigmoid(v);
      return sum(mul(t.constant(w), log_clamped(probs, 1e-12)));
    };
    CHECK(finite_diff_check(elem, elementwise, 1e-5).max_relative_error < 1e-6);

    auto graph = [&](Tape& t) {
      const Var m = tanh(matmul(t.param(a), t.param(b)));         // 3x2
      const Var att = softmax(matmul(transpose(m), t.param(c)));  // 2x1
      const Var pooled = matmul(m, att);                          // 3x1
      const Var stacked = stack_rows(std::vector<Var>{pooled, t.param(d), t.param(c)});
      const Var joined = concat(row(stacked, 0), row(stacked, 2));
      return sum(mul(joined, joined));
    };
    CHECK(finite_diff_check(graph, composed, 1e-5).max_relative_error < 1e-4);
  }
}

TEST_CASE("masked softmax gradient leaves masked logits untouched") {
  Param z("z", {4});
  z.value.matrix() << 0.3, -1.0, 2.0, 0.5;
  const std::uint8_t mask[] = {1, 0, 1, 1};
  Tape t;
  const Matrix w = (Matrix(4, 1) << 1.0, 2.0, 3.0, 4.0).finished();
  t.backward(sum(mul(t.constant(w), softmax(t.param(z), mask))));
  CHECK(z.grad[1] == 0.0);
  Param* zs[] = {&z};
  CHECK(finite_diff_check([&](Tape& tt) { return sum(mul(tt.constant(w), softmax(tt.param(z), mask))); }, zs, 1e-5)
            .max_relative_error < 1e-6);
}

TEST_CASE("gather accumulates per occurrence and skips padding") {
  Param table("table", {4, 2});
  table.value.matrix() << 0, 0, 1, 2, 3, 4, 5, 6;
  const int ids[] = {2, 0, 2, 3};
  Tape t;
  const Var g = gather_rows(t, table, ids);
  CHECK(g.value().row(1).isZero());
  t.backward(sum(g));
  CHECK(table.grad.matrix().row(0).isZero());
  CHECK(table.grad.matrix().row(1).isZero());
  CHECK(table.grad.matrix().row(2) == Matrix::Constant(1, 2, 2.0));
  CHECK(table.grad.matrix().row(3) == Matrix::Constant(1, 2, 1.0));
  const int bad[] = {4};
  CHECK_THROWS_AS(gather_rows(t, table, bad), DimensionError);
}
