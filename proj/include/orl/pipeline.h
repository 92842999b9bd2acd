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

#ifndef ORL_PIPELINE_H_
#define ORL_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "orl/embedding.h"
#include "orl/embedding_store.h"
#include "orl/geometry.h"
#include "orl/manifest.h"
#include "orl/network_encoder.h"
#include "orl/segmentation.h"
#include "orl/stage_header.h"
#include "orl/train_config.h"

namespace orl {

struct EncoderConfig {
  std::string kind = "reference";  // reference | checkpoint
  std::filesystem::path checkpoint;
  int dim = 64;
  int input_size = 224;
  EncoderFeature feature = EncoderFeature::kProjector;
};

// One JSON file; relative paths resolve against the file's directory and
// unknown keys are errors.
struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path work_dir = "work";
  uint64_t seed = 0;
  int workers = 0;  // 0 means one per logical CPU
  SegParams segmentation;
  FilterParams filter;
  JitterParams jitter;
  size_t k = 10;
  double fraction = 0.1;
  EncoderConfig encoder;
  // Boxes to use instead of selective search, e.g. ground truth.
  std::filesystem::path external_proposals;
  TrainConfig train;
  int viz_pairs = 8;

  static PipelineConfig from_json(const Json& j,
                                  const std::filesystem::path& base_dir);
  static PipelineConfig read(const std::filesystem::path& path);
  void validate() const;
  int worker_count() const;
};

struct StagePaths {
  explicit StagePaths(const std::filesystem::path& work_dir);

  std::filesystem::path proposals;
  std::filesystem::path image_store;
  std::filesystem::path roi_store;
  std::filesystem::path knn;
  std::filesystem::path pairs;
  std::filesystem::path checkpoint;
  std::filesystem::path loss_history;
  std::filesystem::path viz_dir;
};

// Sidecar carrying the stage header of a binary output.
std::filesystem::path meta_path(const std::filesystem::path& p);

// Each stage reads its inputs from and writes its output to the work
// directory. Outputs carry a digest of the stage's config and of its
// upstream digests; a stage refuses to run on upstream outputs whose digest
// does not match the current config.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);

  void propose();
  void embed(StoreKind kind);
  void knn();
  void pairs();
  void train();
  // Renders the `pair_count` most similar pairs (config default when unset).
  void viz(std::optional<int> pair_count = std::nullopt);
  void run_all();

  const PipelineConfig& config() const { return cfg_; }
  const StagePaths& paths() const { return paths_; }

  // Digest an up-to-date output of `stage` would carry: one of propose,
  // embed-image, embed-roi, knn, pairs, train, viz.
  std::string stage_digest(const std::string& stage) const;

 private:
  Json stage_config(const std::string& stage) const;
  StageHeader header_for(const std::string& stage,
                         std::initializer_list<std::string> upstream) const;
  void require(const std::string& stage, const std::filesystem::path& path,
               const std::string& what) const;
  std::unique_ptr<Encoder> make_encoder() const;
  const DatasetManifest& manifest() const;

  PipelineConfig cfg_;
  StagePaths paths_;
  mutable std::optional<DatasetManifest> manifest_;
  mutable std::map<std::string, std::string> digests_;
};

}  // namespace orl

#endif  // ORL_PIPELINE_H_
