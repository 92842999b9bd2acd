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

#ifndef ORL_OPTIM_H_
#define ORL_OPTIM_H_

#include <cstdint>
#include <span>

#include "orl/network.h"

namespace orl {

// g = grad + weight_decay * param; buf = momentum * buf + g;
// param -= lr * buf.
void sgd_step(std::span<double> params, std::span<const double> grads,
              std::span<double> momentum_buf, double lr, double momentum,
              double weight_decay);

struct SgdState {
  NetworkParams buffers;  // zero-initialized on first use

  bool initialized() const { return !buffers.backbone.layers.empty(); }
};

void sgd_step(NetworkParams& params, const NetworkParams& grads, SgdState& state,
              double lr, double momentum, double weight_decay);

// target = tau * target + (1 - tau) * online over the backbone and projector.
void ema_update(TargetParams& target, const NetworkParams& online, double tau);

// Cosine ramp from tau_base at step 0 to exactly 1 at step `total`.
double tau_schedule(int64_t step, int64_t total, double tau_base);

// Linear warmup to `base` over `warmup` steps, then cosine decay to 0 at
// step `total`.
double lr_schedule(int64_t step, int64_t total, int64_t warmup, double base);

// Linear scaling rule: lr_per_256 * batch / 256.
double scaled_base_lr(int batch, double lr_per_256 = 0.2);

}  // namespace orl

#endif  // ORL_OPTIM_H_
