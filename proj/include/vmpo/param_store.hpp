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

#ifndef VMPO_PARAM_STORE_HPP_
#define VMPO_PARAM_STORE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vmpo/tensor.hpp"

namespace vmpo {

// Named, shaped slices into one flat 64-bit real vector. Slices are laid out
// back to back in registration order, so they are disjoint and cover the
// flat vector exactly.
class ParameterStore {
 public:
  struct Entry {
    std::string name;
    std::vector<int> shape;
    std::size_t offset = 0;
    std::size_t size = 0;
  };

  std::size_t add(const std::string& name, std::vector<int> shape);

  std::size_t entry_count() const { return entries_.size(); }
  const Entry& entry(std::size_t idx) const { return entries_.at(idx); }
  const std::vector<Entry>& entries() const { return entries_; }

  bool has(const std::string& name) const { return index_.count(name) > 0; }
  std::size_t index_of(const std::string& name) const;

  std::span<double> slice(std::size_t idx);
  std::span<const double> slice(std::size_t idx) const;
  std::span<double> slice(const std::string& name) { return slice(index_of(name)); }
  std::span<const double> slice(const std::string& name) const {
    return slice(index_of(name));
  }

  double get_scalar(const std::string& name) const { return slice(name)[0]; }
  void set_scalar(const std::string& name, double v) { slice(name)[0] = v; }

  Tensor tensor(std::size_t idx) const;
  void set_tensor(std::size_t idx, const Tensor& t);

  std::vector<double>& flat() { return flat_; }
  const std::vector<double>& flat() const { return flat_; }
  std::size_t flat_size() const { return flat_.size(); }

  // Copy-in/copy-out of the full flat vector; the round trip is the identity.
  std::vector<double> flatten() const { return flat_; }
  void unflatten(std::span<const double> values);

  // Name of the entry owning a flat coordinate, for diagnostics.
  std::string name_of_coordinate(std::size_t flat_index) const;

 private:
  std::vector<double> flat_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace vmpo

#endif  // VMPO_PARAM_STORE_HPP_
