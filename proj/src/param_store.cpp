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

#include "vmpo/param_store.hpp"

#include <stdexcept>

namespace vmpo {

std::size_t ParameterStore::add(const std::string& name, std::vector<int> shape) {
  if (index_.count(name)) {
    throw std::invalid_argument("ParameterStore: duplicate entry " + name);
  }
  Entry e;
  e.name = name;
  e.offset = flat_.size();
  e.size = static_cast<std::size_t>(Tensor::numel(shape));
  e.shape = std::move(shape);
  flat_.resize(flat_.size() + e.size, 0.0);
  entries_.push_back(std::move(e));
  index_[name] = entries_.size() - 1;
  return entries_.size() - 1;
}

std::size_t ParameterStore::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::invalid_argument("ParameterStore: no entry named " + name);
  }
  return it->second;
}

std::span<double> ParameterStore::slice(std::size_t idx) {
  const Entry& e = entries_.at(idx);
  return {flat_.data() + e.offset, e.size};
}

std::span<const double> ParameterStore::slice(std::size_t idx) const {
  const Entry& e = entries_.at(idx);
  return {flat_.data() + e.offset, e.size};
}

Tensor ParameterStore::tensor(std::size_t idx) const {
  const Entry& e = entries_.at(idx);
  return Tensor(e.shape, std::vector<double>(flat_.begin() + e.offset,
                                             flat_.begin() + e.offset + e.size));
}

void ParameterStore::set_tensor(std::size_t idx, const Tensor& t) {
  const Entry& e = entries_.at(idx);
  if (t.shape() != e.shape) {
    throw std::invalid_argument("ParameterStore: shape mismatch for " + e.name);
  }
  std::copy(t.data(), t.data() + e.size, flat_.begin() + e.offset);
}

void ParameterStore::unflatten(std::span<const double> values) {
  if (values.size() != flat_.size()) {
    throw std::invalid_argument("ParameterStore: unflatten size " +
                                std::to_string(values.size()) + " != " +
                                std::to_string(flat_.size()));
  }
  std::copy(values.begin(), values.end(), flat_.begin());
}

std::string ParameterStore::name_of_coordinate(std::size_t flat_index) const {
  for (const Entry& e : entries_) {
    if (flat_index >= e.offset && flat_index < e.offset + e.size) {
      return e.name + "[" + std::to_string(flat_index - e.offset) + "]";
    }
  }
  return "<out of range>";
}

}  // namespace vmpo
