// Copyright 2026 The pecsim Authors
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
#include <random>
#include <span>

namespace pecsim {

/// Mixes a master seed with stream coordinates (sample index, step, ...) into
/// an independent 64-bit seed. Pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// Seeded generator with platform-independent draws. std::mt19937_64 is
/// bit-specified by the standard; the standard distributions are not, so the
/// conversions below are done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Index drawn from the cumulative distribution `cdf` (last entry is the
  /// total mass, which need not be exactly 1).
  std::size_t categorical(std::span<const double> cdf);

 private:
  std::mt19937_64 engine_;
};

}  // namespace pecsim
