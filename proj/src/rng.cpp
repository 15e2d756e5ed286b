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

#include "vmpo/rng.hpp"

#include <sstream>
#include <stdexcept>

namespace vmpo {

double draw_uniform(RngEngine& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double draw_normal(RngEngine& rng, double mean, double stddev) {
  return std::normal_distribution<double>(mean, stddev)(rng);
}

int draw_int(RngEngine& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over the mixed inputs.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::uint64_t> save_engine(const RngEngine& rng) {
  std::ostringstream oss;
  oss << rng;
  std::istringstream iss(oss.str());
  std::vector<std::uint64_t> words;
  std::uint64_t w;
  while (iss >> w) words.push_back(w);
  return words;
}

void load_engine(RngEngine& rng, std::span<const std::uint64_t> words) {
  std::ostringstream oss;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) oss << ' ';
    oss << words[i];
  }
  std::istringstream iss(oss.str());
  iss >> rng;
  if (iss.fail()) throw std::runtime_error("load_engine: malformed engine state");
}

}  // namespace vmpo
