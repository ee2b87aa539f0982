#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "topothermo/dsl.hpp"
#include "topothermo/errors.hpp"

using namespace topothermo;

namespace {

double eval(const std::string& src, std::vector<double> q, const dsl::ParameterSet& p = {}) {
  const auto ast = dsl::parse(src, q.size(), p);
  return dsl::evaluate<double>(ast, std::span<const double>(q), p);
}

Errc parse_error_code(const std::string& src, std::size_t n, int* line = nullptr, int* col = nullptr) {
  try {
    dsl::parse(src, n, {{"a", 1.0}});
  } catch (const ParseError& e) {
    if (line) *line = e.line();
    if (col) *col = e.column();
    return e.code();
  }
  FAIL("expected a parse error for: " << src);
  return Errc::config_error;
}

// random expression over q[0..n-1], a and the elementary functions
std::string random_expr(std::mt19937& gen, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 2);
  switch (pick(gen)) {
    case 0: return "q[" + std::to_string(gen() % 3) + "]";
    case 1: return std::to_string(static_cast<int>(gen() % 7) + 1) + ".25";
    case 2: return "a";
    case 3: return "(" + random_expr(gen, depth - 1) + " + " + random_expr(gen, depth - 1) + ")";
    case 4: return random_expr(gen, depth - 1) + " - " + random_expr(gen, depth - 1);
    case 5: return random_expr(gen, depth - 1) + " * " + random_expr(gen, depth - 1);
    case 6: return "-" + random_expr(gen, depth - 1);
    case 7: return "(" + random_expr(gen, depth - 1) + ")^" + std::to_string(gen() % 4);
    case 8: return "cos(" + random_expr(gen, depth - 1) + ")";
    default: return "sum_i(q[i]^2 * " + random_expr(gen, 0) + ")";
  }
}

}  // namespace

TEST_SUITE("dsl") {

TEST_CASE("arithmetic and precedence") {
  CHECK(eval("1 + 2 * 3", {0.0}) == doctest::Approx(7.0));
  CHECK(eval("-2^2", {0.0}) == doctest::Approx(-4.0));
  CHECK(eval("(1 + 2)^2 / 3", {0.0}) == doctest::Approx(3.0));
  CHECK(eval("q[0]^-2", {2.0}) == doctest::Approx(0.25));
  CHECK(eval("2 - 3 - 4", {0.0}) == doctest::Approx(-5.0));
  CHECK(eval("pi", {0.0}) == doctest::Approx(std::numbers::pi));
  CHECK(eval("sqrt(q[0]) + log(exp(q[1])) + sin(0) + cos(0)", {4.0, 1.5}) == doctest::Approx(4.5));
}

TEST_CASE("site sums") {
  CHECK(eval("sum_i(q[i]^2)", {1.0, 2.0, 3.0}) == doctest::Approx(14.0));
  // periodic: (q0-q1)^2 + (q1-q2)^2 + (q2-q0)^2
  CHECK(eval("sum_i(( q[i] - q[i+1] )^2)", {1.0, 2.0, 4.0}) == doctest::Approx(1.0 + 4.0 + 9.0));
  CHECK(eval("sum_i[open](( q[i] - q[i+1] )^2)", {1.0, 2.0, 4.0}) == doctest::Approx(5.0));
  CHECK(eval("sum_i[periodic](J * q[i] * q[i-1])", {1.0, 2.0, 3.0}, {{"J", 2.0}}) ==
        doctest::Approx(2.0 * (1 * 3 + 2 * 1 + 3 * 2)));
}

TEST_CASE("errors carry category and location") {
  int line = 0, col = 0;
  CHECK(parse_error_code("q[0] +", 1, &line, &col) == Errc::syntax_error);
  CHECK(line == 1);
  CHECK(parse_error_code("q[0] $ 1", 1, &line, &col) == Errc::syntax_error);
  CHECK(col == 6);
  CHECK(parse_error_code("q[0] +\n  * 2", 1, &line, &col) == Errc::syntax_error);
  CHECK(line == 2);
  CHECK(parse_error_code("q[3]", 2) == Errc::index_error);
  CHECK(parse_error_code("q[5]", 3, &line, &col) == Errc::index_error);
  CHECK(line == 1);
  CHECK(col == 1);
  // a site-relative index outside sum_i is malformed rather than out of range
  CHECK(parse_error_code("q[i]", 2) == Errc::syntax_error);
  CHECK(parse_error_code("b * q[0]", 1) == Errc::unknown_identifier);
  CHECK(parse_error_code("tan(q[0])", 1) != Errc::config_error);
}

TEST_CASE("round trip on fixed sources") {
  const std::vector<std::string> sources{
      "q[0]^4/4 - q[0]^2/2",
      "sum_i(q[i]^4/4 - q[i]^2/2 + J/4*(q[i] - q[i+1])^2)",
      "sum_i[open](1 - cos(q[i+1] - q[i])) - a*q[0]",
      "-(-q[1])^3 * exp(-q[0]^2)",
      "2 - (3 - q[0])",
      "1/(1/q[1])",
  };
  for (const auto& src : sources) {
    CAPTURE(src);
    const auto ast = dsl::parse(src, 2, {{"J", 1.0}, {"a", 0.5}});
    const auto again = dsl::parse(dsl::serialize(ast), 2, {{"J", 1.0}, {"a", 0.5}});
    CHECK(ast == again);
    CHECK(dsl::serialize(again) == dsl::serialize(ast));
  }
}

TEST_CASE("round trip property on random expressions") {
  std::mt19937 gen(2024);
  const dsl::ParameterSet p{{"a", 0.7}};
  for (int t = 0; t < 300; ++t) {
    const std::string src = random_expr(gen, 4);
    CAPTURE(src);
    const auto ast = dsl::parse(src, 3, p);
    const auto again = dsl::parse(dsl::serialize(ast), 3, p);
    CHECK(ast == again);
    const std::vector<double> q{0.3, -0.7, 1.1};
    const double a = dsl::evaluate<double>(ast, std::span<const double>(q), p);
    const double b = dsl::evaluate<double>(again, std::span<const double>(q), p);
    if (std::isfinite(a)) CHECK(b == doctest::Approx(a).epsilon(1e-14));
  }
}

TEST_CASE("dual evaluation gives exact derivatives") {
  const auto ast = dsl::parse("q[0]^3 * sin(q[1]) + exp(q[0]*q[1])", 2);
  const double x = 0.4, y = -1.3;
  std::vector<Dual<double>> q{{x, 1.0}, {y, 0.0}};
  const auto d = dsl::evaluate<Dual<double>>(ast, std::span<const Dual<double>>(q), {});
  CHECK(d.d == doctest::Approx(3 * x * x * std::sin(y) + y * std::exp(x * y)).epsilon(1e-14));
  using DD = Dual<Dual<double>>;
  std::vector<DD> qq{DD{Dual<double>{x, 0.0}, Dual<double>{1.0, 0.0}}, DD{Dual<double>{y, 1.0}, Dual<double>{0.0, 0.0}}};
  const auto dd = dsl::evaluate<DD>(ast, std::span<const DD>(qq), {});
  // ∂²/∂x∂y
  CHECK(dd.d.d == doctest::Approx(3 * x * x * std::cos(y) + std::exp(x * y) * (1 + x * y)).epsilon(1e-14));
}

}
