// Copyright 2026 The vmpo Authors
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

#ifndef VMPO_RNG_HPP_
#define VMPO_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace vmpo {

using RngEngine = std::mt19937_64;

// Distribution objects are constructed per call so a draw is a pure function
// of the engine state; that keeps checkpointed streams resumable.
double draw_uniform(RngEngine& rng, double lo, double hi);
double draw_normal(RngEngine& rng, double mean = 0.0, double stddev = 1.0);
int draw_int(RngEngine& rng, int lo, int hi);  // inclusive bounds

// Decorrelated child seed for a named stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Engine state as raw words, for binary checkpoints.
std::vector<std::uint64_t> save_engine(const RngEngine& rng);
void load_engine(RngEngine& rng, std::span<const std::uint64_t> words);

}  // namespace vmpo

#endif  // VMPO_RNG_HPP_
