// Copyright 2026 The Rankdiag Authors.
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

// Counter-based seed derivation. Every random stream in the library is keyed
// by (seed, purpose, index...) so results never depend on which worker ran
// which piece of the computation.

#ifndef RANKDIAG_RANDOM_H_
#define RANKDIAG_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rankdiag {

// Stream purposes. Distinct tags keep e.g. the graph stream of seed s apart
// from the multiplier stream of the same seed.
enum class StreamTag : std::uint64_t {
  kGraph = 0x6772617068ULL,
  kEdge = 0x65646765ULL,
  kMultiplier = 0x78696d756cULL,
  kReplication = 0x7265706cULL,
};

// SplitMix64 finalizer.
inline std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t seed, StreamTag tag,
                                std::initializer_list<std::uint64_t> keys) {
  std::uint64_t state = Mix64(seed ^ Mix64(static_cast<std::uint64_t>(tag)));
  for (std::uint64_t key : keys) state = Mix64(state ^ Mix64(key));
  return state;
}

inline std::mt19937_64 MakeStream(std::uint64_t seed, StreamTag tag,
                                  std::initializer_list<std::uint64_t> keys) {
  return std::mt19937_64(DeriveSeed(seed, tag, keys));
}

}  // namespace rankdiag

#endif  // RANKDIAG_RANDOM_H_
