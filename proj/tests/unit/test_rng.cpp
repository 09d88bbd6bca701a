#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "skewpivot/rng.hpp"

using namespace skewpivot;

// Known-answer vectors published with the reference Philox4x32-10 implementation.
TEST_CASE("philox known answers", "[rng]") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and addressable", "[rng]") {
  Stream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u32() == b.next_u32());

  // replicate streams do not depend on creation order
  std::vector<double> forward, backward(10);
  for (std::uint64_t r = 0; r < 10; ++r) forward.push_back(Stream::for_replicate(9, r, Purpose::data).uniform());
  for (std::uint64_t r = 10; r-- > 0;) backward[r] = Stream::for_replicate(9, r, Purpose::data).uniform();
  CHECK(forward == backward);

  std::set<std::uint32_t> firsts;
  for (std::uint64_t r = 0; r < 50; ++r)
    for (auto p : {Purpose::data, Purpose::weights, Purpose::bootstrap, Purpose::auxiliary})
      firsts.insert(Stream::for_replicate(1, r, p).next_u32());
  CHECK(firsts.size() == 200);
  CHECK(Stream(1, 0).next_u32() != Stream(2, 0).next_u32());
}

TEST_CASE("uniforms stay inside the open unit interval", "[rng]") {
  Stream s(5, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("normal and exponential draws have the right low moments", "[rng]") {
  Stream s(11, 3);
  constexpr int n = 400000;
  double m1 = 0, m2 = 0, m3 = 0, e1 = 0, e2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
    m3 += z * z * z;
    const double e = s.exponential();
    e1 += e;
    e2 += e * e;
  }
  CHECK(std::abs(m1 / n) < 0.01);
  CHECK(std::abs(m2 / n - 1.0) < 0.01);
  CHECK(std::abs(m3 / n) < 0.03);
  CHECK(std::abs(e1 / n - 1.0) < 0.01);
  CHECK(std::abs(e2 / n - 2.0) < 0.03);
}

TEST_CASE("index draws cover the range evenly", "[rng]") {
  Stream s(8, 8);
  std::vector<int> counts(7, 0);
  constexpr int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = s.index(7);
    REQUIRE(k < 7);
    counts[k]++;
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}
