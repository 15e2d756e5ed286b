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

#include "vmpo/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vmpo {

namespace {

constexpr char kMagic[4] = {'V', 'M', 'P', 'O'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void f64s(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void u64s(const std::vector<std::uint64_t>& v) {
    u64(v.size());
    for (std::uint64_t x : v) u64(x);
  }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s(data_ + pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<double> f64s() {
    const std::uint64_t n = u64();
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  std::vector<std::uint64_t> u64s() {
    const std::uint64_t n = u64();
    std::vector<std::uint64_t> v(n);
    for (auto& x : v) x = u64();
    return v;
  }
  std::vector<char> raw(std::uint64_t n) {
    need(n);
    std::vector<char> v(data_ + pos_, data_ + pos_ + n);
    pos_ += n;
    return v;
  }

 private:
  unsigned char byte() { return static_cast<unsigned char>(data_[pos_++]); }
  void need(std::uint64_t n) const {
    if (pos_ + n > size_) throw std::runtime_error("checkpoint: truncated file");
  }
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

void write_section(Writer& out, const Writer& section) {
  out.u64(section.bytes().size());
  out.raw(section.bytes().data(), section.bytes().size());
}

Reader read_section(Reader& in, std::vector<std::vector<char>>& storage) {
  const std::uint64_t n = in.u64();
  storage.push_back(in.raw(n));
  return Reader(storage.back().data(), storage.back().size());
}

}  // namespace

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  Writer out;
  out.raw(kMagic, 4);
  out.u32(kCheckpointVersion);

  // parameters
  {
    Writer s;
    s.str(c.env_name);
    s.u64(c.env_params.size());
    for (const auto& [k, v] : c.env_params) {
      s.str(k);
      s.f64(v);
    }
    s.u64(static_cast<std::uint64_t>(c.net_spec.obs_dim));
    s.u64(c.net_spec.action_space.kind == ActionSpace::Kind::kDiscrete ? 0 : 1);
    s.u64(static_cast<std::uint64_t>(c.net_spec.action_space.size));
    s.f64(c.net_spec.action_space.low);
    s.f64(c.net_spec.action_space.high);
    s.u64(static_cast<std::uint64_t>(c.net_spec.num_tasks));
    s.u64(static_cast<std::uint64_t>(c.net_spec.trunk_width));
    s.u64(static_cast<std::uint64_t>(c.net_spec.head_width));
    s.u64(c.layout.size());
    for (const auto& e : c.layout) {
      s.str(e.name);
      s.u64(e.shape.size());
      for (int d : e.shape) s.u64(static_cast<std::uint64_t>(d));
    }
    s.f64s(c.flat);
    s.u64(c.has_snapshot ? 1 : 0);
    if (c.has_snapshot) {
      s.u64(c.snapshot_version);
      s.f64s(c.snapshot_flat);
    }
    s.u64(c.next_snapshot_version);
    write_section(out, s);
  }

  // lagrange
  {
    Writer s;
    s.u64(c.lagrange.decoupled ? 1 : 0);
    s.f64(c.lagrange.eta);
    s.f64(c.lagrange.eps_eta);
    s.f64(c.lagrange.alpha);
    s.f64(c.lagrange.eps_alpha);
    s.f64(c.lagrange.alpha_mu);
    s.f64(c.lagrange.alpha_sigma);
    s.f64(c.lagrange.eps_alpha_mu);
    s.f64(c.lagrange.eps_alpha_sigma);
    s.f64(LagrangeState::kFloor);
    write_section(out, s);
  }

  // popart
  {
    Writer s;
    s.f64(c.popart.step_size);
    s.f64(c.popart.scale_lo);
    s.f64(c.popart.scale_hi);
    s.f64s(c.popart.mean);
    s.f64s(c.popart.second_moment);
    s.f64s(c.popart.scale);
    write_section(out, s);
  }

  // optimizer
  {
    Writer s;
    s.u64(c.adam.step);
    s.f64(c.adam.beta1);
    s.f64(c.adam.beta2);
    s.f64(c.adam.epsilon);
    s.f64s(c.adam.m);
    s.f64s(c.adam.v);
    s.u64(c.learn_step);
    s.u64(c.env_frames);
    write_section(out, s);
  }

  // rng / resume
  {
    Writer s;
    s.u64(c.actors.size());
    for (const auto& a : c.actors) {
      s.u64s(a.engine_words);
      s.f64s(a.env_state);
      s.f64s(a.pending_obs);
      s.u64(a.need_reset ? 1 : 0);
    }
    s.u64(c.has_eval ? 1 : 0);
    s.f64(c.last_eval.mean);
    s.f64(c.last_eval.min);
    s.f64(c.last_eval.max);
    write_section(out, s);
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  f.write(out.bytes().data(), static_cast<std::streamsize>(out.bytes().size()));
  if (!f) throw std::runtime_error("checkpoint: write to " + path + " failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader in(bytes.data(), bytes.size());

  const std::vector<char> magic = in.raw(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw std::runtime_error("checkpoint: " + path + " is not a VMPO checkpoint");
  }
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(version));
  }

  Checkpoint c;
  std::vector<std::vector<char>> storage;

  {
    Reader s = read_section(in, storage);
    c.env_name = s.str();
    const std::uint64_t np = s.u64();
    for (std::uint64_t i = 0; i < np; ++i) {
      const std::string k = s.str();
      c.env_params[k] = s.f64();
    }
    c.net_spec.obs_dim = static_cast<int>(s.u64());
    c.net_spec.action_space.kind =
        s.u64() == 0 ? ActionSpace::Kind::kDiscrete : ActionSpace::Kind::kContinuous;
    c.net_spec.action_space.size = static_cast<int>(s.u64());
    c.net_spec.action_space.low = s.f64();
    c.net_spec.action_space.high = s.f64();
    c.net_spec.num_tasks = static_cast<int>(s.u64());
    c.net_spec.trunk_width = static_cast<int>(s.u64());
    c.net_spec.head_width = static_cast<int>(s.u64());
    const std::uint64_t entries = s.u64();
    std::size_t offset = 0;
    for (std::uint64_t i = 0; i < entries; ++i) {
      ParameterStore::Entry e;
      e.name = s.str();
      const std::uint64_t rank = s.u64();
      for (std::uint64_t r = 0; r < rank; ++r) e.shape.push_back(static_cast<int>(s.u64()));
      e.offset = offset;
      e.size = static_cast<std::size_t>(Tensor::numel(e.shape));
      offset += e.size;
      c.layout.push_back(std::move(e));
    }
    c.flat = s.f64s();
    c.has_snapshot = s.u64() != 0;
    if (c.has_snapshot) {
      c.snapshot_version = s.u64();
      c.snapshot_flat = s.f64s();
    }
    c.next_snapshot_version = s.u64();
  }

  {
    Reader s = read_section(in, storage);
    c.lagrange.decoupled = s.u64() != 0;
    c.lagrange.eta = s.f64();
    c.lagrange.eps_eta = s.f64();
    c.lagrange.alpha = s.f64();
    c.lagrange.eps_alpha = s.f64();
    c.lagrange.alpha_mu = s.f64();
    c.lagrange.alpha_sigma = s.f64();
    c.lagrange.eps_alpha_mu = s.f64();
    c.lagrange.eps_alpha_sigma = s.f64();
    s.f64();  // positivity floor, fixed at compile time
  }

  {
    Reader s = read_section(in, storage);
    c.popart.step_size = s.f64();
    c.popart.scale_lo = s.f64();
    c.popart.scale_hi = s.f64();
    c.popart.mean = s.f64s();
    c.popart.second_moment = s.f64s();
    c.popart.scale = s.f64s();
  }

  {
    Reader s = read_section(in, storage);
    c.adam.step = s.u64();
    c.adam.beta1 = s.f64();
    c.adam.beta2 = s.f64();
    c.adam.epsilon = s.f64();
    c.adam.m = s.f64s();
    c.adam.v = s.f64s();
    c.learn_step = s.u64();
    c.env_frames = s.u64();
  }

  {
    Reader s = read_section(in, storage);
    const std::uint64_t n = s.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      ActorResume a;
      a.engine_words = s.u64s();
      a.env_state = s.f64s();
      a.pending_obs = s.f64s();
      a.need_reset = s.u64() != 0;
      c.actors.push_back(std::move(a));
    }
    c.has_eval = s.u64() != 0;
    c.last_eval.mean = s.f64();
    c.last_eval.min = s.f64();
    c.last_eval.max = s.f64();
  }

  return c;
}

}  // namespace vmpo
