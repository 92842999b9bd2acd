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

#include "orl/trainer.h"

#include <charconv>
#include <cmath>
#include <map>

#include "orl/augment.h"
#include "orl/error.h"
#include "orl/log.h"
#include "orl/optim.h"
#include "orl/parallel.h"
#include "orl/rng.h"

namespace orl {
namespace {

// Stream tags.
constexpr uint64_t kInitTag = 1;
constexpr uint64_t kPermTag = 2;
constexpr uint64_t kViewTag = 3;

enum Purpose : uint64_t { kGlobal = 0, kIntra = 1, kInter = 2, kCrops = 3 };

struct Sample {
  std::vector<double> g1, g2, a1, a2, b1, b2;
  std::array<std::vector<double>, 4> crops;
};

std::vector<double> square_view(const ImageBuffer& img, const BoundingBox& box,
                                int side, int grid, const AugmentParams& aug,
                                Rng& rng) {
  const ImageBuffer patch = resize_bilinear(crop_region(img, box), side, side);
  return augment_view(patch, grid, aug, rng);
}

Matrix stack(const std::vector<Sample>& samples,
             std::vector<double> Sample::*member) {
  const size_t rows = (samples.front().*member).size();
  Matrix m(rows, samples.size());
  for (size_t s = 0; s < samples.size(); ++s) {
    const auto& v = samples[s].*member;
    for (size_t r = 0; r < rows; ++r) m(r, s) = v[r];
  }
  return m;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

CorrespondenceIndex::CorrespondenceIndex(std::span<const CorrespondencePair> pairs,
                                         size_t image_count)
    : groups_(image_count) {
  std::vector<std::map<uint64_t, std::vector<size_t>>> by_neighbor(image_count);
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (p.query_id >= image_count || p.neighbor_id >= image_count) {
      throw DataError("correspondence references unknown image " +
                      std::to_string(std::max(p.query_id, p.neighbor_id)));
    }
    by_neighbor[p.query_id][p.neighbor_id].push_back(i);
  }
  for (size_t q = 0; q < image_count; ++q) {
    for (auto& [nb, idx] : by_neighbor[q]) groups_[q].push_back({nb, std::move(idx)});
  }
}

TrainPlan plan_training(const TrainingSet& data, const CorrespondenceIndex& index,
                        const TrainConfig& cfg) {
  cfg.validate();
  TrainPlan plan;
  for (size_t i = 0; i < data.images.size(); ++i) {
    if (cfg.mode == TrainMode::kOrl) {
      const bool has_boxes = i < data.proposals.size() && !data.proposals[i].empty();
      if (index.groups(i).empty() || !has_boxes) {
        log_warning("image " + std::to_string(i) +
                    " has no correspondence or proposals; skipped");
        continue;
      }
    }
    plan.images.push_back(i);
  }
  if (plan.images.empty()) {
    throw DataError("no usable training images in " +
                    std::string(mode_name(cfg.mode)) + " mode");
  }
  const int64_t n = static_cast<int64_t>(plan.images.size());
  plan.steps_per_epoch = cfg.steps_per_epoch > 0
                             ? cfg.steps_per_epoch
                             : (n + cfg.batch - 1) / cfg.batch;
  plan.total_steps = plan.steps_per_epoch * cfg.epochs;
  plan.warmup_steps = plan.steps_per_epoch * cfg.warmup_epochs;
  return plan;
}

std::vector<size_t> batch_images(const TrainPlan& plan, const TrainConfig& cfg,
                                 int64_t step) {
  const int64_t epoch = step / plan.steps_per_epoch;
  const int64_t within = step % plan.steps_per_epoch;
  std::vector<size_t> perm = plan.images;
  Rng rng = Rng::derive(cfg.seed, {kPermTag, static_cast<uint64_t>(epoch)});
  for (size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.index(i)]);
  }
  std::vector<size_t> out(cfg.batch);
  for (int s = 0; s < cfg.batch; ++s) {
    out[s] = perm[static_cast<size_t>(within * cfg.batch + s) % perm.size()];
  }
  return out;
}

ViewBatch build_view_batch(const TrainingSet& data, const CorrespondenceIndex& index,
                           const TrainConfig& cfg, std::span<const size_t> images,
                           int64_t step, int workers) {
  const AugmentParams& aug = cfg.augment;
  const int grid = cfg.backbone_grid;
  std::vector<Sample> samples(images.size());
  parallel_for(images.size(), workers, [&](size_t s) {
    const ImageBuffer& img = data.images[images[s]];
    auto stream = [&](Purpose p) {
      return Rng::derive(cfg.seed, {kViewTag, static_cast<uint64_t>(step), s, p});
    };
    Sample& out = samples[s];

    Rng g = stream(kGlobal);
    for (auto* view : {&out.g1, &out.g2}) {
      const BoundingBox box = random_resized_crop_box(
          img.width(), img.height(), aug.crop_scale_lo, aug.crop_scale_hi,
          aug.crop_ratio_lo, aug.crop_ratio_hi, g);
      *view = square_view(img, box, cfg.global_view, grid, aug, g);
    }

    if (cfg.mode == TrainMode::kOrl) {
      Rng a = stream(kIntra);
      const auto& boxes = data.proposals[images[s]];
      const BoundingBox& source = boxes[a.index(boxes.size())];
      for (auto* view : {&out.a1, &out.a2}) {
        const BoundingBox j =
            jitter_box(source, img.width(), img.height(), cfg.jitter, a);
        *view = square_view(img, j, cfg.local_view, grid, aug, a);
      }

      Rng b = stream(kInter);
      const auto& groups = index.groups(images[s]);
      const auto& group = groups[b.index(groups.size())];
      const CorrespondencePair& pair =
          data.pairs[group.pairs[b.index(group.pairs.size())]];
      out.b1 = square_view(img, pair.query_box, cfg.local_view, grid, aug, b);
      out.b2 = square_view(data.images[pair.neighbor_id], pair.neighbor_box,
                           cfg.local_view, grid, aug, b);
    } else if (cfg.mode == TrainMode::kMulticrop) {
      Rng c = stream(kCrops);
      for (auto& view : out.crops) {
        const BoundingBox box = random_resized_crop_box(
            img.width(), img.height(), aug.small_crop_scale_lo,
            aug.small_crop_scale_hi, aug.crop_ratio_lo, aug.crop_ratio_hi, c);
        view = square_view(img, box, cfg.local_view, grid, aug, c);
      }
    }
  });

  ViewBatch batch;
  batch.global1 = stack(samples, &Sample::g1);
  batch.global2 = stack(samples, &Sample::g2);
  if (cfg.mode == TrainMode::kOrl) {
    batch.intra1 = stack(samples, &Sample::a1);
    batch.intra2 = stack(samples, &Sample::a2);
    batch.inter1 = stack(samples, &Sample::b1);
    batch.inter2 = stack(samples, &Sample::b2);
  } else if (cfg.mode == TrainMode::kMulticrop) {
    for (size_t i = 0; i < 4; ++i) {
      batch.crops[i].resize(static_cast<Eigen::Index>(samples.front().crops[i].size()),
                            static_cast<Eigen::Index>(samples.size()));
      for (size_t s = 0; s < samples.size(); ++s) {
        const auto& v = samples[s].crops[i];
        for (size_t r = 0; r < v.size(); ++r) {
          batch.crops[i](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = v[r];
        }
      }
    }
  }
  return batch;
}

std::string format_loss_history(std::span<const LossRecord> history) {
  std::string out = "# step lr tau total L_image L_intra L_inter\n";
  for (const auto& r : history) {
    out += std::to_string(r.step);
    for (double v : {r.lr, r.tau, r.loss.total, r.loss.image, r.loss.intra,
                     r.loss.inter}) {
      out += ' ';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

TrainResult train(const TrainingSet& data, const TrainConfig& cfg,
                  const TrainOptions& options) {
  const CorrespondenceIndex index(data.pairs, data.images.size());
  const TrainPlan plan = plan_training(data, index, cfg);
  if (plan.warmup_steps >= plan.total_steps) {
    throw ConfigError("warmup must be shorter than the schedule");
  }
  TrainResult result;
  result.net = make_dual_network(cfg.network_shape(),
                                 Rng::derive(cfg.seed, {kInitTag}).next_u64());
  result.net.tau = cfg.tau_base;
  DualNetwork& net = result.net;
  SgdState sgd;
  const double base = cfg.base_lr();

  for (int64_t step = 0; step < plan.total_steps; ++step) {
    const double lr = lr_schedule(step, plan.total_steps, plan.warmup_steps, base);
    const std::vector<size_t> images = batch_images(plan, cfg, step);
    const ViewBatch batch =
        build_view_batch(data, index, cfg, images, step, options.workers);
    GradientResult g = compute_gradients(net, batch, cfg.lambda, cfg.mode,
                                         cfg.normalize_embeddings);
    if (!std::isfinite(g.loss.total)) {
      throw NumericError("non-finite loss at step " + std::to_string(step));
    }
    for (const MlpCache& c : g.global_projector_caches) {
      update_running_stats(net.online.projector.norm, c);
    }
    sgd_step(net.online, g.grads, sgd, lr, cfg.momentum, cfg.weight_decay);
    const double tau = tau_schedule(step, plan.total_steps, cfg.tau_base);
    ema_update(net.target, net.online, tau);
    net.tau = tau;
    result.history.push_back({step, lr, tau, g.loss});
    if (options.on_step) options.on_step(step, net);
  }
  return result;
}

}  // namespace orl
