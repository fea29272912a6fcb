// Copyright 2026 The hamcert Authors
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

namespace hamcert {

using Rng = std::mt19937_64;

// Seeds an engine from a path of integers, e.g. (master seed, trial index,
// run index). Streams for distinct paths are independent of scheduling order.
inline Rng make_rng(std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * path.size() + 1);
  words.push_back(static_cast<std::uint32_t>(path.size()));
  for (std::uint64_t v : path) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

// Draws a fresh 64-bit seed from an engine, for handing to a sub-protocol.
inline std::uint64_t draw_seed(Rng& rng) { return rng(); }

}  // namespace hamcert
