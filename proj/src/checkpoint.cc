// Copyright 2026 The ORL Authors.
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

#include "orl/checkpoint.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "orl/error.h"
#include "orl/stage_header.h"

namespace orl {
namespace {

struct Tensor {
  std::vector<uint32_t> dims;
  std::vector<float> values;
};

class Writer {
 public:
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void bytes(const std::string& s) { out_.insert(out_.end(), s.begin(), s.end()); }

  void tensor(const std::string& name, const Matrix& m) {
    u32(static_cast<uint32_t>(name.size()));
    bytes(name);
    u32(2);
    u32(static_cast<uint32_t>(m.rows()));
    u32(static_cast<uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        u32(std::bit_cast<uint32_t>(static_cast<float>(m(r, c))));
      }
    }
  }
  void vector(const std::string& name, const Vector& v) {
    u32(static_cast<uint32_t>(name.size()));
    bytes(name);
    u32(1);
    u32(static_cast<uint32_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      u32(std::bit_cast<uint32_t>(static_cast<float>(v(i))));
    }
  }
  void scalar(const std::string& name, double v) {
    u32(static_cast<uint32_t>(name.size()));
    bytes(name);
    u32(0);
    u32(std::bit_cast<uint32_t>(static_cast<float>(v)));
  }

  std::vector<uint8_t> take() { return std::move(out_); }

 private:
  std::vector<uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> b) : b_(b) {}

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  uint64_t u64() {
    const uint64_t lo = u32();
    return lo | (static_cast<uint64_t>(u32()) << 32);
  }
  std::string bytes(size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(size_t n) const {
    if (b_.size() - pos_ < n) throw DataError("truncated checkpoint");
  }
  std::span<const uint8_t> b_;
  size_t pos_ = 0;
};

class TensorMap {
 public:
  explicit TensorMap(std::map<std::string, Tensor> m) : m_(std::move(m)) {}

  bool has(const std::string& name) const { return m_.count(name) > 0; }

  Matrix matrix(const std::string& name) const {
    const Tensor& t = get(name, 2);
    Matrix m(t.dims[0], t.dims[1]);
    size_t k = 0;
    for (uint32_t r = 0; r < t.dims[0]; ++r) {
      for (uint32_t c = 0; c < t.dims[1]; ++c) m(r, c) = t.values[k++];
    }
    return m;
  }
  Vector vector(const std::string& name) const {
    const Tensor& t = get(name, 1);
    Vector v(t.dims[0]);
    for (uint32_t i = 0; i < t.dims[0]; ++i) v(i) = t.values[i];
    return v;
  }
  double scalar(const std::string& name) const { return get(name, 0).values[0]; }

 private:
  const Tensor& get(const std::string& name, size_t rank) const {
    auto it = m_.find(name);
    if (it == m_.end()) throw DataError("checkpoint is missing tensor " + name);
    if (it->second.dims.size() != rank) {
      throw DataError("checkpoint tensor " + name + " has rank " +
                      std::to_string(it->second.dims.size()));
    }
    return it->second;
  }
  std::map<std::string, Tensor> m_;
};

Mlp read_mlp(const TensorMap& t, const std::string& prefix) {
  Mlp m;
  m.in.weight = t.matrix(prefix + ".in.weight");
  m.in.bias = t.matrix(prefix + ".in.bias");
  m.norm.scale = t.matrix(prefix + ".norm.scale");
  m.norm.shift = t.matrix(prefix + ".norm.shift");
  m.out.weight = t.matrix(prefix + ".out.weight");
  m.out.bias = t.matrix(prefix + ".out.bias");
  const auto hidden = m.in.weight.rows();
  if (t.has(prefix + ".norm.running_mean")) {
    m.norm.running_mean = t.vector(prefix + ".norm.running_mean");
    m.norm.running_var = t.vector(prefix + ".norm.running_var");
  } else {
    m.norm.running_mean = Vector::Zero(hidden);
    m.norm.running_var = Vector::Ones(hidden);
  }
  return m;
}

Backbone read_backbone(const TensorMap& t, const std::string& prefix) {
  Backbone b;
  for (int l = 0;; ++l) {
    const std::string p = prefix + ".backbone." + std::to_string(l);
    if (!t.has(p + ".weight")) break;
    b.layers.push_back({t.matrix(p + ".weight"), t.matrix(p + ".bias")});
  }
  if (b.layers.empty()) throw DataError("checkpoint has no " + prefix + " backbone");
  return b;
}

void check_shapes(const DualNetwork& n) {
  auto check_chain = [](const Backbone& b, const Mlp& proj) {
    for (size_t l = 0; l < b.layers.size(); ++l) {
      const Affine& a = b.layers[l];
      if (a.bias.rows() != a.weight.rows() || a.bias.cols() != 1 ||
          (l > 0 && a.weight.cols() != b.layers[l - 1].weight.rows())) {
        throw DataError("inconsistent backbone shapes in checkpoint");
      }
    }
    if (proj.in.weight.cols() != b.layers.back().weight.rows()) {
      throw DataError("projector does not match backbone in checkpoint");
    }
  };
  check_chain(n.online.backbone, n.online.projector);
  check_chain(n.target.backbone, n.target.projector);
  for (const Mlp& p : n.online.predictors) {
    if (p.in.weight.cols() != n.online.projector.out.weight.rows() ||
        p.out.weight.rows() != n.online.projector.out.weight.rows()) {
      throw DataError("predictor does not match projector in checkpoint");
    }
  }
}

}  // namespace

std::vector<uint8_t> serialize_checkpoint(const DualNetwork& net,
                                          uint64_t config_digest) {
  const auto online = named_params(net.online);
  const auto target = named_params(net.target);
  Writer w;
  w.bytes("ORLC");
  w.u32(kCheckpointVersion);
  w.u64(config_digest);
  w.u32(static_cast<uint32_t>(online.size() + target.size() + 3));
  for (const auto& [name, m] : online) w.tensor("online." + name, *m);
  w.vector("online.projector.norm.running_mean", net.online.projector.norm.running_mean);
  w.vector("online.projector.norm.running_var", net.online.projector.norm.running_var);
  for (const auto& [name, m] : target) w.tensor("target." + name, *m);
  w.scalar("tau", net.tau);
  return w.take();
}

Checkpoint deserialize_checkpoint(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  if (r.bytes(4) != "ORLC") throw DataError("not a checkpoint (bad magic)");
  const uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.config_digest = r.u64();
  const uint32_t count = r.u32();
  std::map<std::string, Tensor> tensors;
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = r.bytes(r.u32());
    Tensor t;
    const uint32_t rank = r.u32();
    if (rank > 2) throw DataError("checkpoint tensor " + name + " has rank > 2");
    uint64_t n = 1;
    for (uint32_t d = 0; d < rank; ++d) {
      t.dims.push_back(r.u32());
      n *= t.dims.back();
    }
    if (n > bytes.size() / 4) throw DataError("truncated checkpoint");
    t.values.resize(n);
    for (auto& v : t.values) v = std::bit_cast<float>(r.u32());
    if (!tensors.emplace(name, std::move(t)).second) {
      throw DataError("duplicate checkpoint tensor " + name);
    }
  }
  if (!r.done()) throw DataError("trailing bytes after checkpoint");

  const TensorMap t(std::move(tensors));
  ck.net.online.backbone = read_backbone(t, "online");
  ck.net.online.projector = read_mlp(t, "online.projector");
  for (int b = 0; b < 3; ++b) {
    ck.net.online.predictors[b] = read_mlp(
        t, std::string("online.predictor.") + branch_name(static_cast<Branch>(b)));
  }
  ck.net.target.backbone = read_backbone(t, "target");
  ck.net.target.projector = read_mlp(t, "target.projector");
  ck.net.tau = t.scalar("tau");
  check_shapes(ck.net);
  return ck;
}

void write_checkpoint(const std::string& path, const DualNetwork& net,
                      uint64_t config_digest) {
  const auto bytes = serialize_checkpoint(net, config_digest);
  write_file(path, std::string(bytes.begin(), bytes.end()));
}

Checkpoint read_checkpoint(const std::string& path) {
  if (!std::filesystem::exists(path)) throw DataError("missing checkpoint: " + path);
  const std::string s = read_file(path);
  return deserialize_checkpoint(
      std::span(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

uint64_t digest_to_u64(const std::string& hex) {
  uint64_t v = 0;
  for (size_t i = 0; i < hex.size() && i < 16; ++i) {
    const char c = hex[i];
    const uint64_t d = c >= 'a' ? c - 'a' + 10 : c >= 'A' ? c - 'A' + 10 : c - '0';
    v = (v << 4) | (d & 0xF);
  }
  return v;
}

}  // namespace orl
