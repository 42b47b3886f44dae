/*
 * Copyright 2026 The rankfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RANKFUSE_RANDOM_H_
#define RANKFUSE_RANDOM_H_

#include <cstdint>
#include <random>

namespace rankfuse {

using Rng = std::mt19937_64;

// SplitMix64 finalizer over (base, stream). Gives independent, reproducible
// seeds for per-instance and per-stage generators.
inline std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Named streams so that stages never share a generator by accident.
enum class SeedStream : std::uint64_t {
  kSplit = 1,
  kForest = 2,
  kAutoencoder = 3,
  kNoise = 4,
  kInstances = 5,
  kLime = 11,
  kShap = 12,
  kAnchor = 13,
  kExplainInstance = 20,
};

inline std::uint64_t DeriveSeed(std::uint64_t base, SeedStream stream) {
  return DeriveSeed(base, static_cast<std::uint64_t>(stream));
}

}  // namespace rankfuse

#endif  // RANKFUSE_RANDOM_H_
