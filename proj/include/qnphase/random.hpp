// Copyright 2026 The qnphase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QNPHASE_RANDOM_HPP
#define QNPHASE_RANDOM_HPP

// Seed lineage. Every random stream in an experiment is derived from the
// master seed and the coordinates of the work item that consumes it, so the
// results never depend on how items are scheduled across threads.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qnphase {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a list of coordinates into a child seed: derive_seed(s, {a, b}) is
/// the seed of stream (a, b) under parent s.
inline std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> coords)
{
    std::uint64_t h = splitmix64(parent);
    for (auto c : coords)
        h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
    return h;
}

// Stream tags.
enum class StreamTag : std::uint64_t {
    realization = 1,
    phases = 2,
    shot_noise = 3,
    fixed_phase = 4,
};

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

} // namespace qnphase

#endif // QNPHASE_RANDOM_HPP
