#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "topothermo/parallel.hpp"
#include "topothermo/rng.hpp"

using namespace topothermo;

TEST_SUITE("rng") {

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST_CASE("philox known answers") {
  using C = Philox4x32::counter_type;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("draws are addressable and in [0,1)") {
  CounterRng rng(42, Stream::volume);
  std::vector<double> a(7), b(7);
  rng.uniforms(123456789012ull, a);
  rng.uniforms(123456789012ull, b);
  CHECK(a == b);
  for (double x : a) {
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  // prefix property: a shorter request is a prefix of a longer one
  std::vector<double> c(3);
  rng.uniforms(123456789012ull, c);
  CHECK(std::equal(c.begin(), c.end(), a.begin()));
}

TEST_CASE("streams and seeds decorrelate") {
  std::vector<double> a(4), b(4), c(4);
  CounterRng(1, Stream::volume).uniforms(0, a);
  CounterRng(1, Stream::cylinder).uniforms(0, b);
  CounterRng(2, Stream::volume).uniforms(0, c);
  CHECK(a != b);
  CHECK(a != c);
}

TEST_CASE("uniform moments") {
  CounterRng rng(7, Stream::volume);
  const std::size_t n = 200000;
  double s = 0.0, s2 = 0.0;
  std::vector<double> u(2);
  for (std::size_t i = 0; i < n; ++i) {
    rng.uniforms(i, u);
    s += u[0];
    s2 += u[0] * u[0];
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(var - 1.0 / 12.0) < 2e-3);
}

TEST_CASE("parallel_chunks covers every chunk and rethrows") {
  std::vector<int> seen(37, 0);
  parallel_chunks(seen.size(), 4, [&](std::size_t c) { seen[c] += 1; });
  CHECK(std::all_of(seen.begin(), seen.end(), [](int x) { return x == 1; }));
  CHECK_THROWS_AS(parallel_chunks(10, 3, [](std::size_t c) { if (c == 5) throw std::runtime_error("x"); }),
                  std::runtime_error);
  CHECK(chunk_count(0) == 0);
  CHECK(chunk_count(kChunkSize + 1) == 2);
}

}
