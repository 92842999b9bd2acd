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

#ifndef ORL_TRAIN_CONFIG_H_
#define ORL_TRAIN_CONFIG_H_

#include <cstdint>
#include <vector>

#include "orl/augment.h"
#include "orl/geometry.h"
#include "orl/loss.h"
#include "orl/network.h"
#include "orl/optim.h"
#include "orl/stage_header.h"

namespace orl {

struct TrainConfig {
  LossWeights lambda;
  // Base rate is lr_per_256 * batch / 256.
  double lr_per_256 = 0.2;
  int batch = 64;
  int epochs = 50;
  int warmup_epochs = 4;
  // 0 means ceil(dataset size / batch).
  int steps_per_epoch = 0;
  double tau_base = 0.99;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  int global_view = 32;
  int local_view = 16;
  // Views are average-pooled to grid x grid before the backbone, which makes
  // the backbone input size independent of the view size.
  int backbone_grid = 16;
  std::vector<int> backbone_widths = {128, 64};
  int projector_hidden = 64;
  int projector_out = 16;
  int predictor_hidden = 64;
  TrainMode mode = TrainMode::kOrl;
  bool normalize_embeddings = false;
  uint64_t seed = 0;
  JitterParams jitter;
  AugmentParams augment;

  double base_lr() const;
  NetworkShape network_shape() const;
  void validate() const;

  Json to_json() const;
  // Keys not listed in to_json() are rejected.
  static TrainConfig from_json(const Json& j, TrainConfig defaults);
  static TrainConfig from_json(const Json& j) { return from_json(j, TrainConfig()); }
};

}  // namespace orl

#endif  // ORL_TRAIN_CONFIG_H_
