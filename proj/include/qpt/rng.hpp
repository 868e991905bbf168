// Copyright 2026 The Kraus QPT Authors
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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace qpt {

// Seedable random source passed explicitly to every stochastic routine.
// Same seed, same call sequence => bitwise-identical draws.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Independent stream keyed by (seed, tags...). Used by the benchmark
    // harness so that each sweep cell is reproducible on its own.
    static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
        std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        for (auto t : tags) {
            words.push_back(static_cast<std::uint32_t>(t));
            words.push_back(static_cast<std::uint32_t>(t >> 32));
        }
        std::seed_seq mixed(words.begin(), words.end());
        std::uint32_t halves[2];
        mixed.generate(halves, halves + 2);
        return Rng((static_cast<std::uint64_t>(halves[0]) << 32) | halves[1]);
    }

    // Child stream seeded from this one.
    Rng split() { return Rng(engine_()); }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

    // Standard deviation sigma must be > 0.
    double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(engine_); }

    // Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_); }

    std::mt19937_64& engine() { return engine_; }

   private:
    std::mt19937_64 engine_;
};

}  // namespace qpt
