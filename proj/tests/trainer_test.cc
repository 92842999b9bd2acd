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

#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "oracles.h"
#include "orl/checkpoint.h"
#include "orl/error.h"
#include "orl/loss.h"
#include "orl/network.h"
#include "orl/network_encoder.h"
#include "orl/optim.h"
#include "orl/synthetic.h"
#include "orl/trainer.h"
#include "test_util.h"

using orl::Branch;
using orl::DualNetwork;
using orl::LossWeights;
using orl::Matrix;
using orl::TrainMode;

namespace {

bool same_params(const orl::NetworkParams& a, const orl::NetworkParams& b) {
  const auto pa = orl::named_params(a);
  const auto pb = orl::named_params(b);
  for (size_t i = 0; i < pa.size(); ++i) {
    if (*pa[i].second != *pb[i].second) return false;
  }
  return true;
}

bool same_params(const orl::TargetParams& a, const orl::TargetParams& b) {
  const auto pa = orl::named_params(a);
  const auto pb = orl::named_params(b);
  for (size_t i = 0; i < pa.size(); ++i) {
    if (*pa[i].second != *pb[i].second) return false;
  }
  return true;
}

// Forces every online output to `online_out` and every target output to
// `target_out` by zeroing the last weights.
DualNetwork constant_output_network(const std::vector<double>& online_out,
                                    const std::vector<double>& target_out) {
  orl::NetworkShape s = orl_test::tiny_shape();
  s.projector_out = static_cast<int>(online_out.size());
  DualNetwork net = orl::make_dual_network(s, 3);
  for (auto& p : net.online.predictors) {
    p.out.weight.setZero();
    for (size_t i = 0; i < online_out.size(); ++i) p.out.bias(i, 0) = online_out[i];
  }
  net.target.projector.out.weight.setZero();
  for (size_t i = 0; i < target_out.size(); ++i) {
    net.target.projector.out.bias(i, 0) = target_out[i];
  }
  return net;
}

orl::TrainingSet tiny_dataset(size_t n, uint64_t seed) {
  orl::SyntheticParams sp;
  sp.width = sp.height = 64;
  sp.min_side = 20;
  sp.max_side = 30;
  sp.seed = seed;
  orl::TrainingSet data;
  for (size_t i = 0; i < n; ++i) {
    auto scene = orl::make_scene(sp, i);
    data.images.push_back(scene.image);
    data.proposals.push_back(scene.boxes);
  }
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    data.pairs.push_back({i, j, data.proposals[i][0], data.proposals[j][0], 0.9});
    data.pairs.push_back({i, j, data.proposals[i].back(), data.proposals[j][0], 0.8});
  }
  return data;
}

orl::TrainConfig tiny_config(TrainMode mode) {
  orl::TrainConfig c;
  c.mode = mode;
  c.batch = 4;
  c.epochs = 3;
  c.warmup_epochs = 1;
  c.steps_per_epoch = 3;
  c.global_view = 16;
  c.local_view = 8;
  c.backbone_grid = 4;
  c.backbone_widths = {12, 8};
  c.projector_hidden = 8;
  c.projector_out = 4;
  c.predictor_hidden = 8;
  c.seed = 77;
  c.lr_per_256 = 2.0;
  return c;
}

}  // namespace

TEST_CASE("byol_pair_loss examples") {
  const auto b = orl_test::random_batch(TrainMode::kByol, 5, 1);
  const DualNetwork zero = constant_output_network({0.3, -0.7}, {0.3, -0.7});
  CHECK(orl::byol_pair_loss(zero, Branch::kGlobal, b.global1, b.global2, false) == 0.0);

  const DualNetwork two = constant_output_network({1, 0}, {0, 1});
  CHECK(orl::byol_pair_loss(two, Branch::kIntra, b.global1, b.global2, false) ==
        doctest::Approx(2.0).epsilon(1e-15));

  for (uint64_t seed = 0; seed < 4; ++seed) {
    const DualNetwork net = orl_test::tiny_network(seed);
    const auto v = orl_test::random_batch(TrainMode::kByol, 7, seed + 10);
    for (bool normalize : {false, true}) {
      for (Branch br : {Branch::kGlobal, Branch::kIntra, Branch::kInter}) {
        const double got = orl::byol_pair_loss(net, br, v.global1, v.global2, normalize);
        const double want = orl_test::pair_loss(net, br, v.global1, v.global2, normalize);
        CHECK(std::abs(got - want) <= 1e-10);
      }
    }
  }
  const DualNetwork net = orl_test::tiny_network(1);
  const Matrix narrow = Matrix::Zero(11, 5);
  CHECK_THROWS(orl::byol_pair_loss(net, Branch::kGlobal, narrow, narrow, false));
}

TEST_CASE("orl_total_loss composition") {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    const DualNetwork net = orl_test::tiny_network(seed);
    const auto b = orl_test::random_batch(TrainMode::kOrl, 6, seed);
    auto L = [&](Branch br, const Matrix& x1, const Matrix& x2) {
      return orl_test::pair_loss(net, br, x1, x2, false);
    };
    const double a = L(Branch::kGlobal, b.global1, b.global2);
    const double a2 = L(Branch::kGlobal, b.global2, b.global1);
    const double i = L(Branch::kIntra, b.intra1, b.intra2);
    const double i2 = L(Branch::kIntra, b.intra2, b.intra1);
    const double e = L(Branch::kInter, b.inter1, b.inter2);
    const double e2 = L(Branch::kInter, b.inter2, b.inter1);

    const auto all = orl::orl_total_loss(net, b, LossWeights{}, TrainMode::kOrl, false);
    CHECK(std::abs(all.total - (a + i + e + a2 + i2 + e2)) <= 1e-10);
    CHECK(std::abs(all.image - (a + a2)) <= 1e-10);
    CHECK(std::abs(all.intra - (i + i2)) <= 1e-10);
    CHECK(std::abs(all.inter - (e + e2)) <= 1e-10);

    const auto global_only =
        orl::orl_total_loss(net, b, LossWeights{1, 0, 0}, TrainMode::kOrl, false);
    const auto byol = orl::orl_total_loss(net, b, LossWeights{}, TrainMode::kByol, false);
    CHECK(global_only.total == byol.total);
    CHECK(byol.intra == 0.0);
    CHECK(byol.inter == 0.0);

    // Affine in each weight with the breakdown as coefficients.
    const LossWeights w{0.3, 1.7, 2.2};
    const auto weighted = orl::orl_total_loss(net, b, w, TrainMode::kOrl, false);
    CHECK(std::abs(weighted.total -
                   (0.3 * all.image + 1.7 * all.intra + 2.2 * all.inter)) <= 1e-9);

    // Swapping every pair leaves the symmetric total unchanged.
    orl::ViewBatch s = b;
    std::swap(s.global1, s.global2);
    std::swap(s.intra1, s.intra2);
    std::swap(s.inter1, s.inter2);
    CHECK(std::abs(orl::orl_total_loss(net, s, LossWeights{}, TrainMode::kOrl, false).total -
                   all.total) <= 1e-12);
  }
}

TEST_CASE("multicrop pairs each crop with the opposite global view") {
  const DualNetwork net = orl_test::tiny_network(5);
  const auto b = orl_test::random_batch(TrainMode::kMulticrop, 4, 5);
  auto both = [&](Branch br, const Matrix& x, const Matrix& y) {
    return orl_test::pair_loss(net, br, x, y, false) + orl_test::pair_loss(net, br, y, x, false);
  };
  const auto got = orl::orl_total_loss(net, b, LossWeights{}, TrainMode::kMulticrop, false);
  const double intra = both(Branch::kIntra, b.crops[0], b.global2) +
                       both(Branch::kIntra, b.crops[1], b.global1);
  const double inter = both(Branch::kInter, b.crops[2], b.global2) +
                       both(Branch::kInter, b.crops[3], b.global1);
  CHECK(std::abs(got.intra - intra) <= 1e-10);
  CHECK(std::abs(got.inter - inter) <= 1e-10);
}

TEST_CASE("missing views for the mode are errors") {
  const DualNetwork net = orl_test::tiny_network(0);
  const auto byol = orl_test::random_batch(TrainMode::kByol, 4, 0);
  CHECK_THROWS_AS(orl::orl_total_loss(net, byol, LossWeights{}, TrainMode::kOrl, false),
                  orl::DataError);
  CHECK_THROWS_AS(
      orl::orl_total_loss(net, byol, LossWeights{}, TrainMode::kMulticrop, false),
      orl::DataError);
  CHECK_THROWS_AS(orl::parse_mode("simclr"), orl::ConfigError);
}

TEST_CASE("gradients match central finite differences") {
  for (uint64_t seed : {11, 12, 13}) {
    for (TrainMode mode : {TrainMode::kOrl, TrainMode::kMulticrop}) {
      for (bool normalize : {false, true}) {
        const DualNetwork net = orl_test::tiny_network(seed);
        const auto b = orl_test::random_batch(mode, 5, seed + 100);
        const LossWeights w{1.0, 0.7, 1.3};
        const auto g = orl::compute_gradients(net, b, w, mode, normalize);
        const auto report = orl_test::finite_difference_check(
            net, g.grads, [&](const DualNetwork& n) {
              return orl::orl_total_loss(n, b, w, mode, normalize).total;
            });
        INFO("seed " << seed << " worst " << report.worst_name);
        CHECK(report.worst < 1e-4);
        CHECK(report.checked > 500);
      }
    }
  }
}

TEST_CASE("zero loss gives a zero gradient at the predictor output layer") {
  const DualNetwork net = constant_output_network({0.2, 0.4, -0.1}, {0.2, 0.4, -0.1});
  const auto b = orl_test::random_batch(TrainMode::kOrl, 4, 2);
  const auto g = orl::compute_gradients(net, b, LossWeights{}, TrainMode::kOrl, false);
  CHECK(g.loss.total == 0.0);
  for (const auto& p : g.grads.predictors) {
    CHECK(p.out.weight.isZero(0.0));
    CHECK(p.out.bias.isZero(0.0));
  }
}

TEST_CASE("shared projector gradient is the sum over branches") {
  const DualNetwork net = orl_test::tiny_network(8);
  const auto b = orl_test::random_batch(TrainMode::kOrl, 5, 8);
  const auto all = orl::compute_gradients(net, b, LossWeights{1, 1, 1}, TrainMode::kOrl, false);
  const auto g1 = orl::compute_gradients(net, b, LossWeights{1, 0, 0}, TrainMode::kOrl, false);
  const auto g2 = orl::compute_gradients(net, b, LossWeights{0, 1, 0}, TrainMode::kOrl, false);
  const auto g3 = orl::compute_gradients(net, b, LossWeights{0, 0, 1}, TrainMode::kOrl, false);
  const auto pa = orl::named_params(all.grads);
  const auto p1 = orl::named_params(g1.grads);
  const auto p2 = orl::named_params(g2.grads);
  const auto p3 = orl::named_params(g3.grads);
  for (size_t i = 0; i < pa.size(); ++i) {
    const Matrix sum = *p1[i].second + *p2[i].second + *p3[i].second;
    CHECK((*pa[i].second - sum).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(!g2.grads.projector.in.weight.isZero(0.0));
  CHECK(g2.grads.predictor(Branch::kGlobal).out.weight.isZero(0.0));
}

TEST_CASE("sgd_step examples") {
  std::vector<double> p = {1.0, -2.0}, buf = {0.3, 0.1};
  const std::vector<double> g = {0.5, 0.25};
  orl::sgd_step(p, g, buf, 0.0, 0.9, 1e-4);
  CHECK(p == std::vector<double>{1.0, -2.0});

  std::vector<double> q = {1.0}, qb = {0.0};
  orl::sgd_step(q, std::vector<double>{0.5}, qb, 0.1, 0.0, 0.0);
  CHECK(q[0] == doctest::Approx(0.95).epsilon(1e-15));

  // Hand-unrolled recurrence with momentum 0.9 and weight decay 0.01.
  double x = 2.0, v = 0.0;
  std::vector<double> px = {2.0}, pb = {0.0};
  const double grads[3] = {0.5, -0.2, 0.1};
  for (double gr : grads) {
    orl::sgd_step(px, std::vector<double>{gr}, pb, 0.05, 0.9, 0.01);
    const double step = gr + 0.01 * x;
    v = 0.9 * v + step;
    x = x - 0.05 * v;
    CHECK(px[0] == doctest::Approx(x).epsilon(1e-15));
  }
}

TEST_CASE("ema_update examples") {
  DualNetwork net = orl_test::tiny_network(4);
  const orl::TargetParams before = net.target;
  orl::ema_update(net.target, net.online, 1.0);
  CHECK(same_params(net.target, before));

  orl::ema_update(net.target, net.online, 0.0);
  CHECK(net.target.projector.out.weight == net.online.projector.out.weight);
  CHECK(net.target.backbone.layers[1].bias == net.online.backbone.layers[1].bias);

  for (auto& [n, m] : orl::named_params(net.target)) m->setOnes();
  for (auto& [n, m] : orl::named_params(net.online)) m->setZero();
  orl::ema_update(net.target, net.online, 0.99);
  CHECK(net.target.projector.in.weight(0, 0) == doctest::Approx(0.99).epsilon(1e-15));
}

TEST_CASE("tau and learning-rate schedules") {
  CHECK(orl::tau_schedule(0, 100, 0.99) == 0.99);
  CHECK(orl::tau_schedule(100, 100, 0.99) == 1.0);
  CHECK(orl::tau_schedule(50, 100, 0.99) == doctest::Approx(0.995).epsilon(1e-15));
  double last = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double t = orl::tau_schedule(k, 100, 0.99);
    CHECK(t >= last);
    last = t;
  }
  CHECK_THROWS_AS(orl::tau_schedule(101, 100, 0.99), orl::ConfigError);

  CHECK(orl::lr_schedule(10, 100, 10, 0.3) == 0.3);
  CHECK(orl::lr_schedule(100, 100, 10, 0.3) == 0.0);
  CHECK(orl::lr_schedule(0, 100, 10, 0.3) == 0.0);
  CHECK(orl::lr_schedule(5, 100, 10, 0.3) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(orl::scaled_base_lr(512) == 0.4);
  CHECK(orl::scaled_base_lr(256) == 0.2);
}

TEST_CASE("training is deterministic and independent of worker count") {
  const auto data = tiny_dataset(6, 1);
  const auto cfg = tiny_config(TrainMode::kOrl);
  const auto a = orl::train(data, cfg, {1, nullptr});
  const auto b = orl::train(data, cfg, {3, nullptr});
  CHECK(orl::serialize_checkpoint(a.net, 1) == orl::serialize_checkpoint(b.net, 1));
  CHECK(a.history.size() == 9);
  for (const auto& rec : a.history) {
    CHECK(rec.tau == orl::tau_schedule(rec.step, 9, cfg.tau_base));
  }
}

TEST_CASE("orl with only the image weight follows the byol trajectory") {
  const auto data = tiny_dataset(5, 2);
  auto orl_cfg = tiny_config(TrainMode::kOrl);
  orl_cfg.lambda = {1.0, 0.0, 0.0};
  const auto byol_cfg = tiny_config(TrainMode::kByol);
  std::vector<DualNetwork> byol_steps;
  orl::train(data, byol_cfg, {1, [&](int64_t, const DualNetwork& n) { byol_steps.push_back(n); }});
  size_t mismatches = 0;
  orl::train(data, orl_cfg, {1, [&](int64_t step, const DualNetwork& n) {
               const DualNetwork& ref = byol_steps[step];
               if (!same_params(n.online, ref.online) || !same_params(n.target, ref.target) ||
                   n.online.projector.norm.running_mean != ref.online.projector.norm.running_mean) {
                 ++mismatches;
               }
             }});
  CHECK(byol_steps.size() == 9);
  CHECK(mismatches == 0);
}

TEST_CASE("target changes only through the moving average") {
  const auto data = tiny_dataset(4, 3);
  auto cfg = tiny_config(TrainMode::kByol);
  cfg.tau_base = 1.0;
  std::vector<DualNetwork> steps;
  orl::train(data, cfg, {1, [&](int64_t, const DualNetwork& n) { steps.push_back(n); }});
  // With tau = 1 at every step the target keeps its initial values.
  for (size_t i = 1; i < steps.size(); ++i) {
    CHECK(steps[i].tau == 1.0);
    CHECK(same_params(steps[i].target, steps[0].target));
    CHECK(!same_params(steps[i].online, steps[i - 1].online));
  }
}

TEST_CASE("orl mode skips images without correspondence and fails when none remain") {
  auto data = tiny_dataset(4, 4);
  const auto cfg = tiny_config(TrainMode::kOrl);
  data.pairs.erase(std::remove_if(data.pairs.begin(), data.pairs.end(),
                                  [](const auto& p) { return p.query_id == 2; }),
                   data.pairs.end());
  const orl::CorrespondenceIndex index(data.pairs, data.images.size());
  const auto plan = orl::plan_training(data, index, cfg);
  CHECK(plan.images == std::vector<size_t>{0, 1, 3});

  data.pairs.clear();
  CHECK_THROWS_AS(orl::train(data, cfg), orl::DataError);
  auto byol = tiny_config(TrainMode::kByol);
  CHECK_NOTHROW(orl::train(data, byol));
}

TEST_CASE("view batch shapes follow the mode") {
  const auto data = tiny_dataset(4, 5);
  for (TrainMode mode : {TrainMode::kByol, TrainMode::kOrl, TrainMode::kMulticrop}) {
    const auto cfg = tiny_config(mode);
    const orl::CorrespondenceIndex index(data.pairs, data.images.size());
    const std::vector<size_t> ids = {0, 1, 2, 3, 0};
    const auto b = orl::build_view_batch(data, index, cfg, ids, 0, 2);
    CHECK(b.global1.rows() == 48);
    CHECK(b.global1.cols() == 5);
    CHECK(b.global1.minCoeff() >= 0.0);
    CHECK(b.global1.maxCoeff() <= 1.0);
    CHECK((b.intra1.size() > 0) == (mode == TrainMode::kOrl));
    CHECK((b.inter2.size() > 0) == (mode == TrainMode::kOrl));
    CHECK((b.crops[3].size() > 0) == (mode == TrainMode::kMulticrop));
    const auto again = orl::build_view_batch(data, index, cfg, ids, 0, 1);
    CHECK(again.global1 == b.global1);
    CHECK(again.global2 == b.global2);
  }
}

TEST_CASE("checkpoint round trip and network encoder") {
  orl_test::TempDir dir("checkpoint");
  const auto data = tiny_dataset(4, 6);
  const auto res = orl::train(data, tiny_config(TrainMode::kByol));
  orl::write_checkpoint((dir / "c.orlc").string(), res.net, 0xABCDEF);
  const auto ck = orl::read_checkpoint((dir / "c.orlc").string());
  CHECK(ck.config_digest == 0xABCDEF);
  CHECK(orl::serialize_checkpoint(ck.net, 0xABCDEF) ==
        orl::serialize_checkpoint(res.net, 0xABCDEF));
  const auto p = orl::named_params(ck.net.online);
  const auto q = orl::named_params(res.net.online);
  for (size_t i = 0; i < p.size(); ++i) {
    CHECK((*p[i].second - *q[i].second).cwiseAbs().maxCoeff() <= 1e-6);
  }

  const auto bytes = orl::serialize_checkpoint(res.net, 1);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "ORLC");
  auto cut = bytes;
  cut.resize(cut.size() - 3);
  CHECK_THROWS_AS(orl::deserialize_checkpoint(cut), orl::DataError);

  orl::NetworkEncoder enc(ck.net.online, 16, orl::EncoderFeature::kProjector);
  CHECK(enc.grid() == 4);
  CHECK(enc.dim() == 4);
  const auto v = enc.forward(orl::resize_bilinear(data.images[0], 16, 16));
  CHECK(v.size() == 4);
  CHECK(v == enc.forward(orl::resize_bilinear(data.images[0], 16, 16)));
  orl::NetworkEncoder back(ck.net.online, 8, orl::EncoderFeature::kBackbone);
  CHECK(back.dim() == 8);
  CHECK_THROWS_AS(orl::NetworkEncoder(ck.net.online, 10, orl::EncoderFeature::kBackbone),
                  orl::ConfigError);
}

TEST_CASE("loss history format") {
  orl::LossRecord r{3, 0.25, 0.995, {4.5, 1.0, 2.0, 1.5}};
  CHECK(orl::format_loss_history(std::vector<orl::LossRecord>{r}) ==
        "# step lr tau total L_image L_intra L_inter\n3 0.25 0.995 4.5 1 2 1.5\n");
}
