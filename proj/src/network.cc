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

#include "orl/network.h"

#include <cmath>

#include "orl/error.h"
#include "orl/rng.h"

namespace orl {
namespace {

Affine make_affine(int in, int out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  Affine a{Matrix(out, in), Matrix(out, 1)};
  for (int c = 0; c < in; ++c) {
    for (int r = 0; r < out; ++r) a.weight(r, c) = rng.uniform(-bound, bound);
  }
  for (int r = 0; r < out; ++r) a.bias(r, 0) = rng.uniform(-bound, bound);
  return a;
}

Mlp make_mlp(int in, int hidden, int out, Rng& rng) {
  Mlp m;
  m.in = make_affine(in, hidden, rng);
  m.norm.scale = Matrix::Ones(hidden, 1);
  m.norm.shift = Matrix::Zero(hidden, 1);
  m.norm.running_mean = Vector::Zero(hidden);
  m.norm.running_var = Vector::Ones(hidden);
  m.out = make_affine(hidden, out, rng);
  return m;
}

template <typename M, typename Out>
void append_mlp(const std::string& prefix, M& m, Out& out) {
  out.emplace_back(prefix + ".in.weight", &m.in.weight);
  out.emplace_back(prefix + ".in.bias", &m.in.bias);
  out.emplace_back(prefix + ".norm.scale", &m.norm.scale);
  out.emplace_back(prefix + ".norm.shift", &m.norm.shift);
  out.emplace_back(prefix + ".out.weight", &m.out.weight);
  out.emplace_back(prefix + ".out.bias", &m.out.bias);
}

template <typename B, typename Out>
void append_backbone(B& b, Out& out) {
  for (size_t l = 0; l < b.layers.size(); ++l) {
    const std::string p = "backbone." + std::to_string(l);
    out.emplace_back(p + ".weight", &b.layers[l].weight);
    out.emplace_back(p + ".bias", &b.layers[l].bias);
  }
}

template <typename P, typename T>
std::vector<std::pair<std::string, T*>> online_params(P& p) {
  std::vector<std::pair<std::string, T*>> out;
  append_backbone(p.backbone, out);
  append_mlp("projector", p.projector, out);
  for (Branch b : {Branch::kGlobal, Branch::kIntra, Branch::kInter}) {
    append_mlp(std::string("predictor.") + branch_name(b), p.predictor(b), out);
  }
  return out;
}

template <typename P, typename T>
std::vector<std::pair<std::string, T*>> target_params(P& p) {
  std::vector<std::pair<std::string, T*>> out;
  append_backbone(p.backbone, out);
  append_mlp("projector", p.projector, out);
  return out;
}

}  // namespace

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::kGlobal:
      return "global";
    case Branch::kIntra:
      return "intra";
    case Branch::kInter:
      return "inter";
  }
  return "?";
}

void NetworkShape::validate() const {
  if (input_dim < 1) throw ConfigError("network input dimension must be positive");
  if (backbone_widths.empty()) throw ConfigError("backbone needs at least one layer");
  for (int w : backbone_widths) {
    if (w < 1) throw ConfigError("backbone widths must be positive");
  }
  if (projector_hidden < 1 || projector_out < 1 || predictor_hidden < 1) {
    throw ConfigError("projector/predictor widths must be positive");
  }
}

DualNetwork make_dual_network(const NetworkShape& shape, uint64_t seed) {
  shape.validate();
  Rng rng(seed);
  DualNetwork net;
  int in = shape.input_dim;
  for (int w : shape.backbone_widths) {
    net.online.backbone.layers.push_back(make_affine(in, w, rng));
    in = w;
  }
  net.online.projector =
      make_mlp(in, shape.projector_hidden, shape.projector_out, rng);
  for (auto& pred : net.online.predictors) {
    pred = make_mlp(shape.projector_out, shape.predictor_hidden,
                    shape.projector_out, rng);
  }
  net.target.backbone = net.online.backbone;
  net.target.projector = net.online.projector;
  return net;
}

int backbone_output_dim(const Backbone& b) {
  return static_cast<int>(b.layers.back().weight.rows());
}

int input_dim(const Backbone& b) {
  return static_cast<int>(b.layers.front().weight.cols());
}

std::vector<std::pair<std::string, Matrix*>> named_params(NetworkParams& p) {
  return online_params<NetworkParams, Matrix>(p);
}
std::vector<std::pair<std::string, const Matrix*>> named_params(
    const NetworkParams& p) {
  return online_params<const NetworkParams, const Matrix>(p);
}
std::vector<std::pair<std::string, Matrix*>> named_params(TargetParams& p) {
  return target_params<TargetParams, Matrix>(p);
}
std::vector<std::pair<std::string, const Matrix*>> named_params(
    const TargetParams& p) {
  return target_params<const TargetParams, const Matrix>(p);
}

NetworkParams zeros_like(const NetworkParams& p) {
  NetworkParams z = p;
  for (auto& [name, m] : named_params(z)) m->setZero();
  return z;
}

Matrix backbone_forward(const Backbone& b, const Matrix& x, BackboneCache* cache) {
  if (x.rows() != input_dim(b)) {
    throw DataError("backbone expects " + std::to_string(input_dim(b)) +
                    " input features, got " + std::to_string(x.rows()));
  }
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Matrix h = x;
  for (size_t l = 0; l < b.layers.size(); ++l) {
    if (cache) cache->inputs.push_back(h);
    Matrix z = b.layers[l].weight * h;
    z.colwise() += b.layers[l].bias.col(0);
    if (l + 1 < b.layers.size()) {
      if (cache) cache->pre.push_back(z);
      h = z.cwiseMax(0.0);
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Matrix backbone_backward(const Backbone& b, const BackboneCache& cache,
                         const Matrix& dout, Backbone& grad) {
  Matrix d = dout;
  for (size_t l = b.layers.size(); l-- > 0;) {
    if (l + 1 < b.layers.size()) {
      d = d.cwiseProduct((cache.pre[l].array() > 0.0).cast<double>().matrix());
    }
    grad.layers[l].weight.noalias() += d * cache.inputs[l].transpose();
    grad.layers[l].bias += d.rowwise().sum();
    d = b.layers[l].weight.transpose() * d;
  }
  return d;
}

Matrix mlp_forward(const Mlp& m, const Matrix& x, NormMode mode, MlpCache* cache) {
  Matrix h = m.in.weight * x;
  h.colwise() += m.in.bias.col(0);
  Vector mean, var;
  if (mode == NormMode::kBatch) {
    mean = h.rowwise().mean();
    var = (h.colwise() - mean).array().square().rowwise().mean();
  } else {
    mean = m.norm.running_mean;
    var = m.norm.running_var;
  }
  const Vector denom = var.array().sqrt() + kNormEpsilon;
  const Matrix centered = h.colwise() - mean;
  const Matrix xhat = denom.cwiseInverse().asDiagonal() * centered;
  Matrix y = m.norm.scale.col(0).asDiagonal() * xhat;
  y.colwise() += m.norm.shift.col(0);
  Matrix r = y.cwiseMax(0.0);
  Matrix out = m.out.weight * r;
  out.colwise() += m.out.bias.col(0);
  if (cache) {
    cache->input = x;
    cache->xhat = xhat;
    cache->relu_in = std::move(y);
    cache->relu_out = std::move(r);
    cache->centered = centered;
    cache->mean = mean;
    cache->var = var;
    cache->denom = denom;
  }
  return out;
}

Matrix mlp_backward(const Mlp& m, const MlpCache& c, const Matrix& dout,
                    Mlp& grad) {
  const double batch = static_cast<double>(dout.cols());
  grad.out.weight.noalias() += dout * c.relu_out.transpose();
  grad.out.bias += dout.rowwise().sum();
  Matrix dy = m.out.weight.transpose() * dout;
  dy = dy.cwiseProduct((c.relu_in.array() > 0.0).cast<double>().matrix());

  grad.norm.scale += dy.cwiseProduct(c.xhat).rowwise().sum();
  grad.norm.shift += dy.rowwise().sum();
  const Matrix g = m.norm.scale.col(0).asDiagonal() * dy;  // d(xhat)

  Matrix dh(g.rows(), g.cols());
  for (Eigen::Index f = 0; f < g.rows(); ++f) {
    const double s = c.denom(f);
    const double mean_g = g.row(f).mean();
    const double sd = std::sqrt(c.var(f));
    // Variance path; vanishes when the feature is constant over the batch.
    const double coupling =
        sd > 0.0 ? g.row(f).dot(c.centered.row(f)) / (batch * sd * s * s) : 0.0;
    dh.row(f) = (g.row(f).array() - mean_g) / s -
                coupling * c.centered.row(f).array();
  }

  grad.in.weight.noalias() += dh * c.input.transpose();
  grad.in.bias += dh.rowwise().sum();
  return m.in.weight.transpose() * dh;
}

void update_running_stats(BatchStandardize& norm, const MlpCache& cache,
                          double momentum) {
  norm.running_mean = (1.0 - momentum) * norm.running_mean + momentum * cache.mean;
  norm.running_var = (1.0 - momentum) * norm.running_var + momentum * cache.var;
}

}  // namespace orl
