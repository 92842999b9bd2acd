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

#ifndef ORL_LOSS_H_
#define ORL_LOSS_H_

#include <array>
#include <string>
#include <vector>

#include "orl/network.h"

namespace orl {

enum class TrainMode { kByol, kOrl, kMulticrop };

const char* mode_name(TrainMode m);
TrainMode parse_mode(const std::string& s);

struct LossWeights {
  double image = 1.0;
  double intra = 1.0;
  double inter = 1.0;
};

// Flattened, [0, 1]-scaled views, one sample per column. Which members are
// populated depends on the mode: byol uses the global pair, orl adds the
// intra-RoI and inter-RoI pairs, multicrop adds four small crops.
struct ViewBatch {
  Matrix global1;
  Matrix global2;
  Matrix intra1;
  Matrix intra2;
  Matrix inter1;
  Matrix inter2;
  std::array<Matrix, 4> crops;
};

struct LossBreakdown {
  double total = 0.0;
  // Each component already contains both argument orders.
  double image = 0.0;
  double intra = 0.0;
  double inter = 0.0;
};

// One directed pair loss: the online network sees `online_in`, the target
// sees `target_in`.
struct PairTerm {
  Branch branch;
  int component;  // 0 image, 1 intra, 2 inter
  const Matrix* online_in;
  const Matrix* target_in;
};

// The directed terms that make up the symmetric total for a mode. Throws
// DataError if a view the mode needs is missing.
std::vector<PairTerm> loss_terms(const ViewBatch& batch, TrainMode mode);

// Mean over the batch of |online(x1) - target(x2)|^2, with the online path
// backbone -> projector -> branch predictor and the target path backbone ->
// projector. With `normalize`, both outputs are scaled to unit length first.
double byol_pair_loss(const DualNetwork& net, Branch branch, const Matrix& x1,
                      const Matrix& x2, bool normalize);

LossBreakdown orl_total_loss(const DualNetwork& net, const ViewBatch& batch,
                             const LossWeights& weights, TrainMode mode,
                             bool normalize);

struct GradientResult {
  LossBreakdown loss;
  NetworkParams grads;
  // Online projector caches of the two global-branch terms, for running
  // statistics.
  std::vector<MlpCache> global_projector_caches;
};

// Loss and exact gradients for every online parameter. Terms with zero
// weight are evaluated for the breakdown but contribute no gradient.
GradientResult compute_gradients(const DualNetwork& net, const ViewBatch& batch,
                                 const LossWeights& weights, TrainMode mode,
                                 bool normalize);

}  // namespace orl

#endif  // ORL_LOSS_H_
