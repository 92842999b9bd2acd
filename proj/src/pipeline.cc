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

#include "orl/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "orl/checkpoint.h"
#include "orl/config_json.h"
#include "orl/error.h"
#include "orl/log.h"
#include "orl/montage.h"
#include "orl/parallel.h"
#include "orl/proposals.h"
#include "orl/retrieval.h"
#include "orl/rng.h"
#include "orl/trainer.h"

namespace orl {
namespace fs = std::filesystem;
namespace {

constexpr uint64_t kProposeTag = 11;
constexpr uint64_t kEncoderTag = 12;
constexpr uint64_t kTrainTag = 13;

fs::path resolve_path(const std::string& p, const fs::path& base) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Json seg_json(const SegParams& p) {
  Json j;
  j["k"] = p.k;
  j["min_size"] = p.min_size;
  j["sigma"] = p.sigma;
  j["w_color"] = p.w_color;
  j["w_texture"] = p.w_texture;
  j["w_size"] = p.w_size;
  j["w_fill"] = p.w_fill;
  return j;
}

Json filter_json(const FilterParams& p) {
  Json j;
  j["min_scale"] = p.min_scale;
  j["aspect_lo"] = p.aspect_lo;
  j["aspect_hi"] = p.aspect_hi;
  j["max_iou"] = p.max_iou;
  j["keep_top"] = p.keep_top;
  return j;
}

Json jitter_json(const JitterParams& p) {
  Json j;
  j["center_frac"] = p.center_frac;
  j["area_lo"] = p.area_lo;
  j["area_hi"] = p.area_hi;
  j["aspect_lo"] = p.aspect_lo;
  j["aspect_hi"] = p.aspect_hi;
  return j;
}

void write_meta(const fs::path& path, const StageHeader& h) {
  write_file(meta_path(path), h.to_json().dump() + '\n');
}

}  // namespace

fs::path meta_path(const fs::path& p) {
  fs::path m = p;
  m += ".meta";
  return m;
}

PipelineConfig PipelineConfig::from_json(const Json& j, const fs::path& base_dir) {
  PipelineConfig c;
  ConfigSection s(j, "config");
  std::string manifest, work_dir = c.work_dir.string();
  s.read("manifest", manifest);
  s.read("work_dir", work_dir);
  s.read("seed", c.seed);
  s.read("workers", c.workers);

  const Json seg_j = s.child("segmentation");
  ConfigSection seg(seg_j, "segmentation");
  seg.read("k", c.segmentation.k);
  seg.read("min_size", c.segmentation.min_size);
  seg.read("sigma", c.segmentation.sigma);
  seg.read("w_color", c.segmentation.w_color);
  seg.read("w_texture", c.segmentation.w_texture);
  seg.read("w_size", c.segmentation.w_size);
  seg.read("w_fill", c.segmentation.w_fill);
  seg.finish();

  const Json filter_j = s.child("filter");
  ConfigSection filter(filter_j, "filter");
  filter.read("min_scale", c.filter.min_scale);
  filter.read("aspect_lo", c.filter.aspect_lo);
  filter.read("aspect_hi", c.filter.aspect_hi);
  filter.read("max_iou", c.filter.max_iou);
  filter.read("keep_top", c.filter.keep_top);
  filter.finish();

  const Json jitter_j = s.child("jitter");
  ConfigSection jitter(jitter_j, "jitter");
  jitter.read("center_frac", c.jitter.center_frac);
  jitter.read("area_lo", c.jitter.area_lo);
  jitter.read("area_hi", c.jitter.area_hi);
  jitter.read("aspect_lo", c.jitter.aspect_lo);
  jitter.read("aspect_hi", c.jitter.aspect_hi);
  jitter.finish();

  const Json retrieval_j = s.child("retrieval");
  ConfigSection retrieval(retrieval_j, "retrieval");
  retrieval.read("k", c.k);
  retrieval.read("fraction", c.fraction);
  retrieval.finish();

  const Json encoder_j = s.child("encoder");
  ConfigSection encoder(encoder_j, "encoder");
  std::string checkpoint, feature = feature_name(c.encoder.feature);
  encoder.read("kind", c.encoder.kind);
  encoder.read("checkpoint", checkpoint);
  encoder.read("dim", c.encoder.dim);
  encoder.read("input_size", c.encoder.input_size);
  encoder.read("feature", feature);
  encoder.finish();
  c.encoder.checkpoint = resolve_path(checkpoint, base_dir);
  c.encoder.feature = parse_feature(feature);

  const Json proposals_j = s.child("proposals");
  ConfigSection proposals(proposals_j, "proposals");
  std::string external;
  proposals.read("external", external);
  proposals.finish();
  c.external_proposals = resolve_path(external, base_dir);

  c.train = TrainConfig::from_json(s.child("train"));

  const Json viz_j = s.child("viz");
  ConfigSection viz(viz_j, "viz");
  viz.read("pairs", c.viz_pairs);
  viz.finish();
  s.finish();

  if (manifest.empty()) throw ConfigError("config.manifest is required");
  c.manifest = resolve_path(manifest, base_dir);
  c.work_dir = resolve_path(work_dir, base_dir);
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::read(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("missing config file: " + path.string());
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void PipelineConfig::validate() const {
  segmentation.validate();
  filter.validate();
  jitter.validate();
  train.validate();
  if (k < 1) throw ConfigError("retrieval.k must be >= 1");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("retrieval.fraction must be in (0, 1]");
  }
  if (encoder.kind != "reference" && encoder.kind != "checkpoint") {
    throw ConfigError("encoder.kind must be reference or checkpoint");
  }
  if (encoder.kind == "checkpoint" && encoder.checkpoint.empty()) {
    throw ConfigError("encoder.checkpoint is required for kind checkpoint");
  }
  if (encoder.dim < 4) throw ConfigError("encoder.dim must be >= 4");
  if (encoder.input_size < 8) throw ConfigError("encoder.input_size must be >= 8");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (viz_pairs < 0) throw ConfigError("viz.pairs must be >= 0");
}

int PipelineConfig::worker_count() const {
  return workers > 0 ? workers : default_workers();
}

StagePaths::StagePaths(const fs::path& w)
    : proposals(w / "proposals.jsonl"),
      image_store(w / "image_embeddings.orle"),
      roi_store(w / "roi_embeddings.orle"),
      knn(w / "knn.jsonl"),
      pairs(w / "correspondence.jsonl"),
      checkpoint(w / "checkpoint.orlc"),
      loss_history(w / "loss_history.txt"),
      viz_dir(w / "viz") {}

Pipeline::Pipeline(PipelineConfig cfg) : cfg_(std::move(cfg)), paths_(cfg_.work_dir) {
  cfg_.validate();
}

const DatasetManifest& Pipeline::manifest() const {
  if (!manifest_) manifest_ = DatasetManifest::read(cfg_.manifest);
  return *manifest_;
}

Json Pipeline::stage_config(const std::string& stage) const {
  Json j;
  j["stage"] = stage;
  if (stage == "propose") {
    j["manifest"] = file_digest(cfg_.manifest);
    j["seed"] = cfg_.seed;
    j["segmentation"] = seg_json(cfg_.segmentation);
    j["filter"] = filter_json(cfg_.filter);
    j["external"] = cfg_.external_proposals.empty()
                        ? std::string()
                        : file_digest(cfg_.external_proposals);
  } else if (stage == "embed-image" || stage == "embed-roi") {
    j["manifest"] = file_digest(cfg_.manifest);
    j["seed"] = cfg_.seed;
    Json e;
    e["kind"] = cfg_.encoder.kind;
    e["checkpoint"] = cfg_.encoder.kind == "checkpoint"
                          ? file_digest(cfg_.encoder.checkpoint)
                          : std::string();
    e["dim"] = cfg_.encoder.dim;
    e["input_size"] = cfg_.encoder.input_size;
    e["feature"] = feature_name(cfg_.encoder.feature);
    j["encoder"] = e;
    if (stage == "embed-roi") j["propose"] = stage_digest("propose");
  } else if (stage == "knn") {
    j["k"] = cfg_.k;
    j["embed-image"] = stage_digest("embed-image");
  } else if (stage == "pairs") {
    j["fraction"] = cfg_.fraction;
    j["knn"] = stage_digest("knn");
    j["embed-roi"] = stage_digest("embed-roi");
    j["propose"] = stage_digest("propose");
  } else if (stage == "train") {
    j["manifest"] = file_digest(cfg_.manifest);
    j["seed"] = cfg_.seed;
    j["train"] = cfg_.train.to_json();
    j["jitter"] = jitter_json(cfg_.jitter);
    if (cfg_.train.mode == TrainMode::kOrl) {
      j["pairs"] = stage_digest("pairs");
      j["propose"] = stage_digest("propose");
    }
  } else if (stage == "viz") {
    j["manifest"] = file_digest(cfg_.manifest);
    j["pairs"] = stage_digest("pairs");
  } else {
    throw ConfigError("unknown stage " + stage);
  }
  return j;
}

std::string Pipeline::stage_digest(const std::string& stage) const {
  auto it = digests_.find(stage);
  if (it != digests_.end()) return it->second;
  const std::string d = digest_hex(stage_config(stage).dump());
  digests_[stage] = d;
  return d;
}

StageHeader Pipeline::header_for(const std::string& stage,
                                 std::initializer_list<std::string> upstream) const {
  StageHeader h{stage, stage_digest(stage), {}};
  for (const auto& u : upstream) h.upstream[u] = stage_digest(u);
  return h;
}

void Pipeline::require(const std::string& stage, const fs::path& path,
                       const std::string& what) const {
  if (!fs::exists(path)) {
    throw DataError("missing " + what + " file: " + path.string());
  }
  std::optional<StageHeader> h;
  if (path.extension() == ".orle" || path.extension() == ".orlc") {
    const fs::path meta = meta_path(path);
    if (fs::exists(meta)) {
      const auto lines = read_lines(meta);
      if (!lines.empty()) {
        const Json j = parse_json_line(lines.front(), meta, 1);
        if (StageHeader::is_header(j)) h = StageHeader::from_json(j);
      }
    }
  } else {
    h = read_stage_header(path);
  }
  if (!h || h->stage != stage || h->digest != stage_digest(stage)) {
    throw DataError("stale " + stage + " output " + path.string() + "; rerun " +
                    stage);
  }
}

std::unique_ptr<Encoder> Pipeline::make_encoder() const {
  const EncoderConfig& e = cfg_.encoder;
  if (e.kind == "reference") {
    return reference_histogram_encoder(Rng::derive(cfg_.seed, {kEncoderTag}).next_u64(),
                                       e.dim, e.input_size);
  }
  auto enc = load_network_encoder(e.checkpoint.string(), e.input_size, e.feature);
  if (enc->dim() != e.dim) {
    throw ConfigError("checkpoint encoder dim " + std::to_string(enc->dim()) +
                      " does not match configured encoder.dim " +
                      std::to_string(e.dim));
  }
  return enc;
}

void Pipeline::propose() {
  const DatasetManifest& m = manifest();
  std::optional<ProposalsFile> external;
  if (!cfg_.external_proposals.empty()) {
    external = ProposalsFile::read(cfg_.external_proposals);
  }
  ProposalsFile out;
  out.images.resize(m.size());
  parallel_for(m.size(), cfg_.worker_count(), [&](size_t i) {
    const ManifestEntry& e = m.entries()[i];
    ImageProposals& p = out.images[i];
    p.image_id = e.image_id;
    std::vector<BoundingBox> boxes;
    std::vector<double> scores;
    std::vector<std::string> labels;
    if (external) {
      const ImageProposals* ext = external->find(e.image_id);
      if (!ext) {
        throw DataError("external proposals have no entry for image " +
                        std::to_string(e.image_id));
      }
      boxes = ext->boxes;
      scores = ext->objectness;
      labels = ext->labels;
    } else {
      SegParams sp = cfg_.segmentation;
      sp.seed = Rng::derive(cfg_.seed, {kProposeTag, e.image_id}).next_u64();
      for (const ScoredBox& s : selective_search(m.load(e.image_id), sp)) {
        boxes.push_back(s.box);
        scores.push_back(s.score);
      }
    }
    for (size_t k : select_proposals(boxes, cfg_.filter)) {
      p.boxes.push_back(boxes[k]);
      p.objectness.push_back(scores[k]);
      if (!labels.empty()) p.labels.push_back(labels[k]);
    }
  });
  for (const auto& p : out.images) {
    log_info("image " + std::to_string(p.image_id) + ": " +
             std::to_string(p.boxes.size()) + " proposals");
  }
  out.header = header_for("propose", {});
  fs::create_directories(cfg_.work_dir);
  out.write(paths_.proposals);
}

void Pipeline::embed(StoreKind kind) {
  const DatasetManifest& m = manifest();
  std::optional<ProposalsFile> proposals;
  if (kind == StoreKind::kRoi) {
    require("propose", paths_.proposals, "proposals");
    proposals = ProposalsFile::read(paths_.proposals);
  }
  const auto encoder = make_encoder();
  std::vector<std::vector<EmbeddingVector>> vectors(m.size());
  parallel_for(m.size(), cfg_.worker_count(), [&](size_t i) {
    const ManifestEntry& e = m.entries()[i];
    const ImageBuffer img = m.load(e.image_id);
    if (kind == StoreKind::kImage) {
      vectors[i].push_back(embed_crop(*encoder, img, std::nullopt));
      return;
    }
    const ImageProposals* p = proposals->find(e.image_id);
    if (!p) return;
    for (const BoundingBox& b : p->boxes) vectors[i].push_back(embed_crop(*encoder, img, b));
  });
  EmbeddingStore store(kind, static_cast<uint32_t>(encoder->dim()));
  for (size_t i = 0; i < m.size(); ++i) {
    const uint64_t id = m.entries()[i].image_id;
    for (size_t r = 0; r < vectors[i].size(); ++r) {
      store.add(id, kind == StoreKind::kImage ? kWholeImage : static_cast<uint32_t>(r),
                vectors[i][r]);
    }
  }
  fs::create_directories(cfg_.work_dir);
  if (kind == StoreKind::kImage) {
    store.write(paths_.image_store);
    write_meta(paths_.image_store, header_for("embed-image", {}));
  } else {
    store.write(paths_.roi_store);
    write_meta(paths_.roi_store, header_for("embed-roi", {"propose"}));
  }
}

void Pipeline::knn() {
  require("embed-image", paths_.image_store, "image embedding");
  const EmbeddingStore store = EmbeddingStore::read(paths_.image_store);
  KnnFile out;
  out.sets = knn_images(store, cfg_.k, cfg_.worker_count());
  out.header = header_for("knn", {"embed-image"});
  out.write(paths_.knn);
}

void Pipeline::pairs() {
  require("knn", paths_.knn, "knn");
  require("embed-roi", paths_.roi_store, "roi embedding");
  require("propose", paths_.proposals, "proposals");
  const KnnFile knn = KnnFile::read(paths_.knn);
  const EmbeddingStore rois = EmbeddingStore::read(paths_.roi_store);
  const ProposalsFile proposals = ProposalsFile::read(paths_.proposals);
  CorrespondenceFile out;
  out.pairs = discover_correspondence(proposals, knn.sets, rois, cfg_.fraction,
                                      cfg_.worker_count());
  out.header = header_for("pairs", {"knn", "embed-roi", "propose"});
  out.write(paths_.pairs);
}

void Pipeline::train() {
  const int workers = cfg_.worker_count();
  TrainingSet data;
  data.images = manifest().load_all(workers);
  const bool orl = cfg_.train.mode == TrainMode::kOrl;
  if (orl) {
    require("propose", paths_.proposals, "proposals");
    require("pairs", paths_.pairs, "correspondence");
    const ProposalsFile proposals = ProposalsFile::read(paths_.proposals);
    data.proposals.resize(data.images.size());
    for (const auto& p : proposals.images) {
      if (p.image_id < data.proposals.size()) data.proposals[p.image_id] = p.boxes;
    }
    data.pairs = CorrespondenceFile::read(paths_.pairs).pairs;
  }
  TrainConfig tc = cfg_.train;
  tc.seed = Rng::derive(cfg_.seed, {kTrainTag}).next_u64();
  tc.jitter = cfg_.jitter;
  const TrainResult result = orl::train(data, tc, {workers, nullptr});
  const std::string digest = stage_digest("train");
  fs::create_directories(cfg_.work_dir);
  write_checkpoint(paths_.checkpoint.string(), result.net, digest_to_u64(digest));
  write_meta(paths_.checkpoint,
             orl ? header_for("train", {"pairs", "propose"}) : header_for("train", {}));
  write_file(paths_.loss_history, format_loss_history(result.history));
  const LossRecord& last = result.history.back();
  log_info("trained " + std::to_string(result.history.size()) + " steps, final loss " +
           std::to_string(last.loss.total));
}

void Pipeline::viz(std::optional<int> pair_count) {
  require("pairs", paths_.pairs, "correspondence");
  const CorrespondenceFile file = CorrespondenceFile::read(paths_.pairs);
  const int requested = pair_count.value_or(cfg_.viz_pairs);
  if (requested < 0) throw ConfigError("pair count must be >= 0");
  size_t n = static_cast<size_t>(requested);
  if (n > file.pairs.size()) {
    log_warning("requested " + std::to_string(n) + " pairs but only " +
                std::to_string(file.pairs.size()) + " exist; rendering all");
    n = file.pairs.size();
  }
  std::vector<size_t> order(file.pairs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return file.pairs[a].similarity > file.pairs[b].similarity;
  });

  fs::create_directories(paths_.viz_dir);
  for (const auto& entry : fs::directory_iterator(paths_.viz_dir)) {
    if (entry.path().filename().string().rfind("pair_", 0) == 0) fs::remove(entry.path());
  }
  const DatasetManifest& m = manifest();
  std::vector<std::string> names(n);
  parallel_for(n, cfg_.worker_count(), [&](size_t r) {
    const CorrespondencePair& p = file.pairs[order[r]];
    const ImageBuffer montage = render_pair_montage(
        m.load(p.query_id), p.query_box, m.load(p.neighbor_id), p.neighbor_box,
        pair_color(r));
    char name[32];
    std::snprintf(name, sizeof(name), "pair_%04zu.ppm", r);
    names[r] = name;
    save_image(montage, paths_.viz_dir / name);
  });
  std::string index = header_for("viz", {"pairs"}).to_json().dump() + '\n';
  for (size_t r = 0; r < n; ++r) {
    const CorrespondencePair& p = file.pairs[order[r]];
    Json j;
    j["file"] = names[r];
    j["query_id"] = p.query_id;
    j["neighbor_id"] = p.neighbor_id;
    j["query_box"] = box_to_json(p.query_box);
    j["neighbor_box"] = box_to_json(p.neighbor_box);
    j["similarity"] = p.similarity;
    index += j.dump() + '\n';
  }
  write_file(paths_.viz_dir / "index.jsonl", index);
}

void Pipeline::run_all() {
  propose();
  embed(StoreKind::kImage);
  embed(StoreKind::kRoi);
  knn();
  pairs();
  train();
  viz();
}

}  // namespace orl
