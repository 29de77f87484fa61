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

#include <cmath>
#include <numbers>

namespace ews {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint32_t substream) noexcept
    : master_seed_(master_seed)
    , stream_id_(stream_id)
    , substream_(substream)
{
}

RngStream RngStream::substream(std::uint32_t index) const noexcept
{
    return RngStream(master_seed_, stream_id_, index);
}

void RngStream::refill() noexcept
{
    const std::array<std::uint32_t, 4> counter{block_, substream_, static_cast<std::uint32_t>(stream_id_),
                                               static_cast<std::uint32_t>(stream_id_ >> 32)};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(master_seed_),
                                           static_cast<std::uint32_t>(master_seed_ >> 32)};
    buffer_ = philox4x32(counter, key);
    buffered_ = 4;
    ++block_;
}

std::uint32_t RngStream::next_u32() noexcept
{
    if (buffered_ == 0) {
        refill();
    }
    return buffer_[4 - buffered_--];
}

std::uint64_t RngStream::next_u64() noexcept
{
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RngStream::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) noexcept
{
    return lo + (hi - lo) * uniform();
}

std::uint64_t RngStream::below(std::uint64_t n) noexcept
{
    // Lemire-style rejection on the low remainder keeps the draw unbiased.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x >= threshold) {
            return x % n;
        }
    }
}

std::int64_t RngStream::integer(std::int64_t lo, std::int64_t hi) noexcept
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(below(span));
}

double RngStream::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    // u1 on (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<double> sample_gaussian(RngStream& rng, std::size_t n)
{
    std::vector<double> out(n);
    for (auto& v : out) {
        v = rng.normal();
    }
    return out;
}

} // namespace ews
