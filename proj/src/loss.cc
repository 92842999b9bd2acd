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

#include "orl/loss.h"

#include <cmath>

#include "orl/error.h"

namespace orl {
namespace {

double component_weight(const LossWeights& w, int component) {
  switch (component) {
    case 0:
      return w.image;
    case 1:
      return w.intra;
    default:
      return w.inter;
  }
}

double& component_slot(LossBreakdown& b, int component) {
  switch (component) {
    case 0:
      return b.image;
    case 1:
      return b.intra;
    default:
      return b.inter;
  }
}

struct PairEval {
  double loss = 0.0;
  Matrix d_online;  // d loss / d online output
  BackboneCache backbone;
  MlpCache projector;
  MlpCache predictor;
};

Matrix target_forward(const TargetParams& t, const Matrix& x) {
  return mlp_forward(t.projector, backbone_forward(t.backbone, x, nullptr),
                     NormMode::kBatch, nullptr);
}

// Loss and its gradient with respect to the online output.
double distance_loss(const Matrix& online, const Matrix& target, bool normalize,
                     Matrix* d_online) {
  if (online.rows() != target.rows() || online.cols() != target.cols()) {
    throw DataError("online/target output shapes differ");
  }
  const double batch = static_cast<double>(online.cols());
  if (!normalize) {
    const Matrix diff = online - target;
    if (d_online) *d_online = (2.0 / batch) * diff;
    return diff.squaredNorm() / batch;
  }
  constexpr double kMinNorm = 1e-12;
  const Eigen::RowVectorXd pn = online.colwise().norm().cwiseMax(kMinNorm);
  const Eigen::RowVectorXd zn = target.colwise().norm().cwiseMax(kMinNorm);
  const Matrix p = online.array().rowwise() / pn.array();
  const Matrix z = target.array().rowwise() / zn.array();
  const Matrix diff = p - z;
  if (d_online) {
    const Matrix g = (2.0 / batch) * diff;  // d loss / d p
    const Eigen::RowVectorXd proj = p.cwiseProduct(g).colwise().sum();
    Matrix d = g - p * proj.asDiagonal();
    *d_online = d.array().rowwise() / pn.array();
  }
  return diff.squaredNorm() / batch;
}

PairEval eval_pair(const DualNetwork& net, Branch branch, const Matrix& x1,
                   const Matrix& x2, bool normalize, bool want_grad) {
  if (x1.cols() != x2.cols()) throw DataError("view batches differ in size");
  PairEval e;
  const Matrix feat = backbone_forward(net.online.backbone, x1,
                                       want_grad ? &e.backbone : nullptr);
  const Matrix proj = mlp_forward(net.online.projector, feat, NormMode::kBatch,
                                  &e.projector);
  const Matrix pred = mlp_forward(net.online.predictor(branch), proj,
                                  NormMode::kBatch,
                                  want_grad ? &e.predictor : nullptr);
  const Matrix target = target_forward(net.target, x2);
  e.loss = distance_loss(pred, target, normalize, want_grad ? &e.d_online : nullptr);
  if (!std::isfinite(e.loss)) {
    throw NumericError(std::string("non-finite loss in ") + branch_name(branch) +
                       " branch");
  }
  return e;
}

}  // namespace

const char* mode_name(TrainMode m) {
  switch (m) {
    case TrainMode::kByol:
      return "byol";
    case TrainMode::kOrl:
      return "orl";
    case TrainMode::kMulticrop:
      return "multicrop";
  }
  return "?";
}

TrainMode parse_mode(const std::string& s) {
  if (s == "byol") return TrainMode::kByol;
  if (s == "orl") return TrainMode::kOrl;
  if (s == "multicrop") return TrainMode::kMulticrop;
  throw ConfigError("unknown mode '" + s + "' (expected byol, orl or multicrop)");
}

std::vector<PairTerm> loss_terms(const ViewBatch& b, TrainMode mode) {
  auto need = [](const Matrix& m, const char* what) {
    if (m.size() == 0) throw DataError(std::string("missing view: ") + what);
  };
  need(b.global1, "global view v");
  need(b.global2, "global view v'");
  std::vector<PairTerm> terms = {
      {Branch::kGlobal, 0, &b.global1, &b.global2},
      {Branch::kGlobal, 0, &b.global2, &b.global1},
  };
  if (mode == TrainMode::kOrl) {
    need(b.intra1, "intra-RoI view p");
    need(b.intra2, "intra-RoI view p'");
    need(b.inter1, "inter-RoI view p1");
    need(b.inter2, "inter-RoI view p2");
    terms.push_back({Branch::kIntra, 1, &b.intra1, &b.intra2});
    terms.push_back({Branch::kIntra, 1, &b.intra2, &b.intra1});
    terms.push_back({Branch::kInter, 2, &b.inter1, &b.inter2});
    terms.push_back({Branch::kInter, 2, &b.inter2, &b.inter1});
  } else if (mode == TrainMode::kMulticrop) {
    for (const auto& c : b.crops) need(c, "multicrop view");
    // Crops 0 and 2 face v', crops 1 and 3 face v; 0-1 use the intra slot
    // and predictor, 2-3 the inter ones.
    const Matrix* opposite[4] = {&b.global2, &b.global1, &b.global2, &b.global1};
    for (int i = 0; i < 4; ++i) {
      const Branch br = i < 2 ? Branch::kIntra : Branch::kInter;
      const int comp = i < 2 ? 1 : 2;
      terms.push_back({br, comp, &b.crops[i], opposite[i]});
      terms.push_back({br, comp, opposite[i], &b.crops[i]});
    }
  }
  return terms;
}

double byol_pair_loss(const DualNetwork& net, Branch branch, const Matrix& x1,
                      const Matrix& x2, bool normalize) {
  return eval_pair(net, branch, x1, x2, normalize, false).loss;
}

LossBreakdown orl_total_loss(const DualNetwork& net, const ViewBatch& batch,
                             const LossWeights& weights, TrainMode mode,
                             bool normalize) {
  LossBreakdown out;
  for (const PairTerm& t : loss_terms(batch, mode)) {
    component_slot(out, t.component) +=
        byol_pair_loss(net, t.branch, *t.online_in, *t.target_in, normalize);
  }
  out.total = weights.image * out.image + weights.intra * out.intra +
              weights.inter * out.inter;
  return out;
}

GradientResult compute_gradients(const DualNetwork& net, const ViewBatch& batch,
                                 const LossWeights& weights, TrainMode mode,
                                 bool normalize) {
  GradientResult r;
  r.grads = zeros_like(net.online);
  for (const PairTerm& t : loss_terms(batch, mode)) {
    const double w = component_weight(weights, t.component);
    const bool want_grad = w != 0.0;
    PairEval e = eval_pair(net, t.branch, *t.online_in, *t.target_in, normalize,
                           want_grad);
    component_slot(r.loss, t.component) += e.loss;
    if (t.component == 0) r.global_projector_caches.push_back(e.projector);
    if (!want_grad) continue;
    const Matrix d_proj = mlp_backward(net.online.predictor(t.branch), e.predictor,
                                       w * e.d_online, r.grads.predictor(t.branch));
    const Matrix d_feat = mlp_backward(net.online.projector, e.projector, d_proj,
                                       r.grads.projector);
    backbone_backward(net.online.backbone, e.backbone, d_feat, r.grads.backbone);
  }
  r.loss.total = weights.image * r.loss.image + weights.intra * r.loss.intra +
                 weights.inter * r.loss.inter;
  return r;
}

}  // namespace orl
