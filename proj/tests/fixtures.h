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

#ifndef ORL_TESTS_FIXTURES_H_
#define ORL_TESTS_FIXTURES_H_

#include <random>

#include "orl/loss.h"
#include "orl/network.h"

namespace orl_test {

inline orl::NetworkShape tiny_shape() {
  orl::NetworkShape s;
  s.input_dim = 12;
  s.backbone_widths = {10, 8};
  s.projector_hidden = 7;
  s.projector_out = 5;
  s.predictor_hidden = 6;
  return s;
}

// A tiny network whose target, scales and shifts are moved away from their
// initial values so no term is trivially symmetric.
inline orl::DualNetwork tiny_network(uint64_t seed) {
  orl::DualNetwork net = orl::make_dual_network(tiny_shape(), seed);
  std::mt19937_64 g(seed * 7919 + 1);
  std::normal_distribution<double> n(0.0, 0.3);
  for (auto& [name, m] : orl::named_params(net.online)) {
    if (name.find("norm") != std::string::npos) *m = m->unaryExpr([&](double v) { return v + n(g); });
  }
  for (auto& [name, m] : orl::named_params(net.target)) {
    *m = m->unaryExpr([&](double v) { return v + 0.5 * n(g); });
  }
  return net;
}

inline orl::Matrix random_views(int rows, int batch, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  orl::Matrix m(rows, batch);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(g);
  return m;
}

inline orl::ViewBatch random_batch(orl::TrainMode mode, int batch, uint64_t seed,
                                   int rows = 12) {
  std::mt19937_64 g(seed);
  orl::ViewBatch b;
  b.global1 = random_views(rows, batch, g);
  b.global2 = random_views(rows, batch, g);
  if (mode == orl::TrainMode::kOrl) {
    b.intra1 = random_views(rows, batch, g);
    b.intra2 = random_views(rows, batch, g);
    b.inter1 = random_views(rows, batch, g);
    b.inter2 = random_views(rows, batch, g);
  } else if (mode == orl::TrainMode::kMulticrop) {
    for (auto& c : b.crops) c = random_views(rows, batch, g);
  }
  return b;
}

}  // namespace orl_test

#endif  // ORL_TESTS_FIXTURES_H_
