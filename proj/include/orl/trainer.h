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

#ifndef ORL_TRAINER_H_
#define ORL_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "orl/image.h"
#include "orl/loss.h"
#include "orl/network.h"
#include "orl/retrieval.h"
#include "orl/train_config.h"

namespace orl {

// Everything the training loop reads. Vectors are indexed by image id.
// `proposals` and `pairs` are only needed in orl mode.
struct TrainingSet {
  std::vector<ImageBuffer> images;
  std::vector<std::vector<BoundingBox>> proposals;
  std::vector<CorrespondencePair> pairs;
};

// Correspondence pairs of each query image, grouped by neighbor image in
// ascending neighbor order.
class CorrespondenceIndex {
 public:
  struct Group {
    uint64_t neighbor_id = 0;
    std::vector<size_t> pairs;  // indices into TrainingSet::pairs
  };

  CorrespondenceIndex(std::span<const CorrespondencePair> pairs, size_t image_count);

  const std::vector<Group>& groups(uint64_t image_id) const {
    return groups_[image_id];
  }

 private:
  std::vector<std::vector<Group>> groups_;
};

struct TrainPlan {
  std::vector<size_t> images;  // images eligible for sampling
  int64_t steps_per_epoch = 0;
  int64_t total_steps = 0;
  int64_t warmup_steps = 0;
};

// Throws DataError when no image is usable in the configured mode.
TrainPlan plan_training(const TrainingSet& data, const CorrespondenceIndex& index,
                        const TrainConfig& cfg);

// Image ids for one step: a per-epoch permutation of the plan's images,
// consumed batch by batch and wrapped when the batch exceeds the dataset.
std::vector<size_t> batch_images(const TrainPlan& plan, const TrainConfig& cfg,
                                 int64_t step);

// Views for one step. Every sample draws from its own stream derived from
// (seed, step, slot), so the result does not depend on `workers`, and the
// global views do not depend on the mode.
ViewBatch build_view_batch(const TrainingSet& data, const CorrespondenceIndex& index,
                           const TrainConfig& cfg, std::span<const size_t> images,
                           int64_t step, int workers);

struct LossRecord {
  int64_t step = 0;
  double lr = 0.0;
  double tau = 0.0;
  LossBreakdown loss;
};

// "step lr tau total L_image L_intra L_inter" rows after a '#' header line.
std::string format_loss_history(std::span<const LossRecord> history);

struct TrainOptions {
  int workers = 1;
  // Called after every optimizer and EMA update.
  std::function<void(int64_t step, const DualNetwork& net)> on_step;
};

struct TrainResult {
  DualNetwork net;
  std::vector<LossRecord> history;
};

// Runs the schedule to completion. Throws NumericError on a non-finite loss.
TrainResult train(const TrainingSet& data, const TrainConfig& cfg,
                  const TrainOptions& options = {});

}  // namespace orl

#endif  // ORL_TRAINER_H_
