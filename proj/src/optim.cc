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

#include "orl/optim.h"

#include <cmath>

#include "orl/error.h"

namespace orl {

void sgd_step(std::span<double> params, std::span<const double> grads,
              std::span<double> momentum_buf, double lr, double momentum,
              double weight_decay) {
  if (params.size() != grads.size() || params.size() != momentum_buf.size()) {
    throw DataError("sgd_step: parameter, gradient and buffer sizes differ");
  }
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i] + weight_decay * params[i];
    momentum_buf[i] = momentum * momentum_buf[i] + g;
    params[i] -= lr * momentum_buf[i];
  }
}

void sgd_step(NetworkParams& params, const NetworkParams& grads, SgdState& state,
              double lr, double momentum, double weight_decay) {
  if (!state.initialized()) state.buffers = zeros_like(params);
  auto p = named_params(params);
  auto g = named_params(grads);
  auto b = named_params(state.buffers);
  for (size_t i = 0; i < p.size(); ++i) {
    Matrix& pm = *p[i].second;
    const Matrix& gm = *g[i].second;
    Matrix& bm = *b[i].second;
    if (pm.size() != gm.size() || pm.size() != bm.size()) {
      throw DataError("sgd_step: shape mismatch in " + p[i].first);
    }
    sgd_step(std::span<double>(pm.data(), pm.size()),
             std::span<const double>(gm.data(), gm.size()),
             std::span<double>(bm.data(), bm.size()), lr, momentum, weight_decay);
  }
}

void ema_update(TargetParams& target, const NetworkParams& online, double tau) {
  if (tau == 1.0) return;
  auto t = named_params(target);
  const auto o = named_params(online);
  // Target names are a prefix of the online ones (backbone, projector).
  for (size_t i = 0; i < t.size(); ++i) {
    Matrix& tm = *t[i].second;
    const Matrix& om = *o[i].second;
    if (t[i].first != o[i].first || tm.rows() != om.rows() || tm.cols() != om.cols()) {
      throw DataError("ema_update: target/online mismatch at " + t[i].first);
    }
    tm = tau * tm + (1.0 - tau) * om;
  }
}

double tau_schedule(int64_t step, int64_t total, double tau_base) {
  if (step < 0 || step > total || total <= 0) {
    throw ConfigError("tau_schedule: step " + std::to_string(step) +
                      " outside [0, " + std::to_string(total) + "]");
  }
  if (step == 0) return tau_base;
  if (step == total) return 1.0;
  const double progress = static_cast<double>(step) / static_cast<double>(total);
  return 1.0 - (1.0 - tau_base) * (std::cos(M_PI * progress) + 1.0) / 2.0;
}

double lr_schedule(int64_t step, int64_t total, int64_t warmup, double base) {
  if (step < warmup) {
    return base * static_cast<double>(step) / static_cast<double>(warmup);
  }
  const double progress = static_cast<double>(step - warmup) /
                          static_cast<double>(total - warmup);
  return base * 0.5 * (1.0 + std::cos(M_PI * progress));
}

double scaled_base_lr(int batch, double lr_per_256) {
  return lr_per_256 * static_cast<double>(batch) / 256.0;
}

}  // namespace orl
