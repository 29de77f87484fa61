/*
 * Copyright 2026 The ewspipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ewspipe/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace ews;

TEST_SUITE("rng") {

TEST_CASE("philox known-answer vectors")
{
    using W = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct")
{
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7), e(42, 7, 1);
    std::set<std::uint64_t> firsts;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        firsts.insert(va);
    }
    CHECK(firsts.size() == 100);
    RngStream a2(42, 7);
    const auto x = a2.next_u64();
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
    CHECK(x != e.next_u64());
    CHECK(RngStream(42, 7).substream(1).next_u64() == RngStream(42, 7, 1).next_u64());
}

TEST_CASE("uniform and normal moments")
{
    RngStream r(1, 0);
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0, sn4 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        su2 += u * u;
        const double z = r.normal();
        sn += z;
        sn2 += z * z;
        sn4 += z * z * z * z;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(su2 / n - (su / n) * (su / n) == doctest::Approx(1.0 / 12).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sn4 / n == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("below is unbiased over a small range")
{
    RngStream r(3, 3);
    std::array<int, 6> counts{};
    const int n = 60000;
    for (int i = 0; i < n; ++i) counts[r.below(6)]++;
    for (int c : counts) CHECK(std::abs(c - n / 6) < 400);
    for (int i = 0; i < 1000; ++i) {
        const auto v = r.integer(-2, 2);
        CHECK(v >= -2);
        CHECK(v <= 2);
    }
}

TEST_CASE("shuffle is a permutation and seed dependent")
{
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto a = v, b = v, c = v;
    RngStream ra(5, 0), rb(5, 0), rc(6, 0);
    shuffle(a, ra);
    shuffle(b, rb);
    shuffle(c, rc);
    CHECK(a == b);
    CHECK(a != c);
    std::sort(a.begin(), a.end());
    CHECK(a == v);
}

}
