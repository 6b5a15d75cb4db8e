#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "crcx/chart.hpp"
#include "crcx/expr.hpp"
#include "support/oracles.hpp"

using crcx::cplx;
using crcx::Jet;
using crcx_test::Point;

TEST_CASE("i*(u1+u2) evaluates to 3i at (1,2,0)") {
  const auto ast = crcx::parse("i*(u1+u2)");
  const Jet j = crcx::eval(ast, {1, 2, 0}, 2);
  CHECK(std::abs(j.value() - cplx(0, 3)) < 1e-15);
}

TEST_CASE("exp(i*u3) at (0,0,pi) is -1") {
  const auto ast = crcx::parse("exp(i*u3)");
  const Jet j = crcx::eval(ast, {0, 0, std::numbers::pi}, 3);
  CHECK(std::abs(j.value() - cplx(-1, 0)) < 1e-14);
}

TEST_CASE("malformed input reports the byte offset") {
  try {
    crcx::parse("(u1+");
    FAIL("expected a parse error");
  } catch (const crcx::ParseError& e) {
    CHECK(e.offset() == 4);
    CHECK(e.code() == crcx::errc::syntax_error);
    CHECK_FALSE(e.expected().empty());
  }
}

TEST_CASE("unknown identifiers are rejected with their name") {
  try {
    crcx::parse("u1 + bogus");
    FAIL("expected an identifier error");
  } catch (const crcx::ParseError& e) {
    CHECK(e.code() == crcx::errc::unknown_identifier);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    CHECK(e.offset() == 5);
  }
}

TEST_CASE("value and gradient of u1^2 + u2^2 at (3,4,0)") {
  const auto ast = crcx::parse("u1^2 + u2^2");
  const Jet j = crcx::eval(ast, {3, 4, 0}, 2);
  CHECK(std::abs(j.value() - cplx(25, 0)) < 1e-13);
  CHECK(std::abs(j.derivative(1, 0, 0) - cplx(6, 0)) < 1e-13);
  CHECK(std::abs(j.derivative(0, 1, 0) - cplx(8, 0)) < 1e-13);
  CHECK(std::abs(j.derivative(0, 0, 1)) < 1e-15);
}

TEST_CASE("conj acts coefficient-wise") {
  const auto ast = crcx::parse("conj(u1 + i*u2)");
  const Jet j = crcx::eval(ast, {1, 2, 0}, 2);
  CHECK(std::abs(j.value() - cplx(1, -2)) < 1e-15);
}

TEST_CASE("sqrt(u1) at u1=4 matches the finite-difference oracle") {
  const auto ast = crcx::parse("sqrt(u1)");
  const Point p{4, 0, 0};
  const Jet j = crcx::eval(ast, p, 2);
  CHECK(std::abs(j.value() - cplx(2, 0)) < 1e-15);
  CHECK(std::abs(j.derivative(1, 0, 0) - cplx(0.25, 0)) < 1e-15);
  const crcx_test::PointFn fn = [](const Point& q) { return std::sqrt(q[0]); };
  CHECK(crcx_test::rel_err(j.derivative(1, 0, 0), crcx_test::fd_first(fn, p, 0)) < 1e-5);
  CHECK(crcx_test::rel_err(j.derivative(2, 0, 0), crcx_test::fd_second(fn, p, 0, 0)) < 1e-5);
}

TEST_CASE("precedence and associativity") {
  CHECK(std::abs(crcx::eval(crcx::parse("2+3*4"), {0, 0, 0}, 0).value() - cplx(14, 0)) < 1e-15);
  CHECK(std::abs(crcx::eval(crcx::parse("2*3^2"), {0, 0, 0}, 0).value() - cplx(18, 0)) < 1e-15);
  CHECK(std::abs(crcx::eval(crcx::parse("-u1^2"), {2, 0, 0}, 1).value() - cplx(-4, 0)) < 1e-15);
  CHECK(std::abs(crcx::eval(crcx::parse("2^3^2"), {0, 0, 0}, 0).value() - cplx(512, 0)) < 1e-15);
  CHECK(std::abs(crcx::eval(crcx::parse("u1^(-2)"), {2, 0, 0}, 1).value() - cplx(0.25, 0)) <
        1e-15);
  CHECK_THROWS_AS(crcx::parse("u1^u2"), crcx::ParseError);
}

namespace {

crcx::ExprPtr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 9);
  std::uniform_real_distribution<double> lit(0.0, 4.0);
  using E = crcx::Expr;
  switch (pick(rng)) {
    case 0: return E::literal(static_cast<double>(static_cast<int>(lit(rng))), true);
    case 1: return E::literal(lit(rng), false);
    case 2: return E::coordinate(static_cast<int>(lit(rng)) % 3);
    case 3: return E::imaginary();
    case 4: return E::unary(E::Unary::neg, random_expr(rng, depth - 1));
    case 5: return E::unary(E::Unary::conj, random_expr(rng, depth - 1));
    case 6:
      return E::binary(static_cast<E::Binary>(static_cast<int>(lit(rng)) % 4),
                       random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 7: return E::power(random_expr(rng, depth - 1), static_cast<int>(lit(rng)));
    case 8: return E::call(E::Fn::exp, random_expr(rng, depth - 1));
    default: return E::call(E::Fn::sin, random_expr(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("parse-print-parse is idempotent") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ast = random_expr(rng, 4);
    const std::string s1 = crcx::print(ast);
    const auto round = crcx::parse(s1);
    CHECK(crcx::expr_equal(ast, round));
    CHECK(crcx::print(round) == s1);
  }
}

TEST_CASE("eval is bit-deterministic") {
  const auto ast = crcx::parse("exp(0.3*u1)*sin(u2) + conj(i*u3)/(1+u1^2)");
  const Point p{0.4, -0.7, 0.9};
  const Jet a = crcx::eval(ast, p, 5);
  const Jet b = crcx::eval(ast, p, 5);
  CHECK(a.max_abs_diff(b) == 0.0);
}

TEST_CASE("chart files parse and round-trip") {
  const std::string text =
      "name = demo\n"
      "[domain]\n"
      "u1 = -1 1\n"
      "u2 = -1 1\n"
      "u3 = -2 2\n"
      "[Z]\n"
      "Z1 = 1\n"
      "Z2 = -i\n"
      "Z3 = 2*u2 + 2*i*u1\n"
      "[theta]\n"
      "theta1 = -2*u2\n"
      "theta2 = 2*u1\n"
      "theta3 = 1\n"
      "[immersion]\n"
      "f1 = u1\n"
      "f2 = u2\n"
      "f3 = u3\n"
      "f4 = u1*u2\n";
  const auto spec = crcx::parse_chart(text, "demo");
  CHECK(spec.name == "demo");
  CHECK(spec.immersion.size() == 4);
  CHECK(spec.domain.lo[2] == -2.0);

  const auto round = crcx::parse_chart(crcx::chart_to_text(spec), "round");
  for (int i = 0; i < 3; ++i) {
    CHECK(crcx::expr_equal(spec.z_raw[static_cast<std::size_t>(i)],
                           round.z_raw[static_cast<std::size_t>(i)]));
    CHECK(crcx::expr_equal(spec.theta[static_cast<std::size_t>(i)],
                           round.theta[static_cast<std::size_t>(i)]));
  }
}

TEST_CASE("chart parse failures carry position information") {
  CHECK_THROWS_MATCHES(
      crcx::parse_chart("name = x\n[domain]\nu1 = 1 0\n", "bad"), crcx::CalcError,
      Catch::Matchers::Predicate<crcx::CalcError>(
          [](const crcx::CalcError& e) { return e.code() == crcx::errc::chart_parse_error; }));
  try {
    crcx::parse_chart(
        "name = x\n[domain]\nu1 = 0 1\nu2 = 0 1\nu3 = 0 1\n[Z]\nZ1 = (u1+\nZ2 = 0\nZ3 = 0\n"
        "[theta]\ntheta1 = 0\ntheta2 = 0\ntheta3 = 1\n",
        "bad");
    FAIL("expected a chart parse error");
  } catch (const crcx::CalcError& e) {
    CHECK(e.code() == crcx::errc::chart_parse_error);
    CHECK(std::string(e.what()).find("bad:7") != std::string::npos);
    CHECK(std::string(e.what()).find("offset 4") != std::string::npos);
  }
}
