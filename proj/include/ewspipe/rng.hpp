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

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace ews {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the same
/// (counter, key) always maps to the same four output words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream.
///
/// Layout of the Philox input, which is part of the dataset reproducibility
/// contract:
///   key     = {master_seed low 32, master_seed high 32}
///   counter = {block index, substream, stream_id low 32, stream_id high 32}
///
/// Each stream owns 2^32 substreams of 2^32 blocks each. Uniform doubles use
/// the top 53 bits of a 64-bit draw; normals come from the Box-Muller
/// transform, consumed in pairs.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint32_t substream = 0) noexcept;

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint32_t substream_index() const noexcept { return substream_; }

    /// Fresh stream on the same (master_seed, stream_id) with a different substream.
    RngStream substream(std::uint32_t index) const noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1).
    double uniform() noexcept;
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept;
    /// Uniform integer on [0, n), unbiased; n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept;
    /// Uniform integer on [lo, hi] inclusive.
    std::int64_t integer(std::int64_t lo, std::int64_t hi) noexcept;
    bool bernoulli(double p) noexcept { return uniform() < p; }
    double normal() noexcept;

    // UniformRandomBitGenerator
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next_u64(); }

private:
    void refill() noexcept;

    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint32_t substream_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// n i.i.d. standard normals drawn from `rng`.
std::vector<double> sample_gaussian(RngStream& rng, std::size_t n);

/// In-place Fisher-Yates shuffle driven by `rng` (portable across standard libraries).
template <class T>
void shuffle(std::vector<T>& items, RngStream& rng)
{
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace ews
