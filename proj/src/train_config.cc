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

#include "orl/train_config.h"

#include "orl/config_json.h"
#include "orl/error.h"

namespace orl {

double TrainConfig::base_lr() const { return scaled_base_lr(batch, lr_per_256); }

NetworkShape TrainConfig::network_shape() const {
  NetworkShape s;
  s.input_dim = backbone_grid * backbone_grid * 3;
  s.backbone_widths = backbone_widths;
  s.projector_hidden = projector_hidden;
  s.projector_out = projector_out;
  s.predictor_hidden = predictor_hidden;
  return s;
}

void TrainConfig::validate() const {
  if (lambda.image < 0 || lambda.intra < 0 || lambda.inter < 0) {
    throw ConfigError("train: loss weights must be >= 0");
  }
  if (batch < 1) throw ConfigError("train: batch must be >= 1");
  if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (warmup_epochs < 0 || warmup_epochs >= epochs) {
    throw ConfigError("train: need 0 <= warmup_epochs < epochs");
  }
  if (steps_per_epoch < 0) throw ConfigError("train: steps_per_epoch must be >= 0");
  if (!(tau_base >= 0.0 && tau_base <= 1.0)) {
    throw ConfigError("train: tau_base must lie in [0, 1]");
  }
  if (!(lr_per_256 >= 0.0) || !(momentum >= 0.0) || !(weight_decay >= 0.0)) {
    throw ConfigError("train: lr, momentum and weight decay must be >= 0");
  }
  if (backbone_grid < 1 || global_view < 8 || local_view < 8 ||
      global_view % backbone_grid != 0 || local_view % backbone_grid != 0) {
    throw ConfigError(
        "train: views must be >= 8 pixels and multiples of backbone_grid");
  }
  network_shape().validate();
  jitter.validate();
  augment.validate();
}

Json TrainConfig::to_json() const {
  Json j;
  j["lambda1"] = lambda.image;
  j["lambda2"] = lambda.intra;
  j["lambda3"] = lambda.inter;
  j["lr_per_256"] = lr_per_256;
  j["batch"] = batch;
  j["epochs"] = epochs;
  j["warmup_epochs"] = warmup_epochs;
  j["steps_per_epoch"] = steps_per_epoch;
  j["tau_base"] = tau_base;
  j["momentum"] = momentum;
  j["weight_decay"] = weight_decay;
  j["global_view"] = global_view;
  j["local_view"] = local_view;
  j["backbone_grid"] = backbone_grid;
  j["backbone_widths"] = backbone_widths;
  j["projector_hidden"] = projector_hidden;
  j["projector_out"] = projector_out;
  j["predictor_hidden"] = predictor_hidden;
  j["mode"] = mode_name(mode);
  j["normalize_embeddings"] = normalize_embeddings;
  Json a;
  a["crop_scale_lo"] = augment.crop_scale_lo;
  a["crop_scale_hi"] = augment.crop_scale_hi;
  a["crop_ratio_lo"] = augment.crop_ratio_lo;
  a["crop_ratio_hi"] = augment.crop_ratio_hi;
  a["small_crop_scale_lo"] = augment.small_crop_scale_lo;
  a["small_crop_scale_hi"] = augment.small_crop_scale_hi;
  a["flip_prob"] = augment.flip_prob;
  a["color_scale"] = augment.color_scale;
  a["color_shift"] = augment.color_shift;
  a["grayscale_prob"] = augment.grayscale_prob;
  j["augment"] = a;
  return j;
}

TrainConfig TrainConfig::from_json(const Json& j, TrainConfig c) {
  ConfigSection s(j, "train");
  s.read("lambda1", c.lambda.image);
  s.read("lambda2", c.lambda.intra);
  s.read("lambda3", c.lambda.inter);
  s.read("lr_per_256", c.lr_per_256);
  s.read("batch", c.batch);
  s.read("epochs", c.epochs);
  s.read("warmup_epochs", c.warmup_epochs);
  s.read("steps_per_epoch", c.steps_per_epoch);
  s.read("tau_base", c.tau_base);
  s.read("momentum", c.momentum);
  s.read("weight_decay", c.weight_decay);
  s.read("global_view", c.global_view);
  s.read("local_view", c.local_view);
  s.read("backbone_grid", c.backbone_grid);
  s.read("backbone_widths", c.backbone_widths);
  s.read("projector_hidden", c.projector_hidden);
  s.read("projector_out", c.projector_out);
  s.read("predictor_hidden", c.predictor_hidden);
  std::string mode = mode_name(c.mode);
  s.read("mode", mode);
  c.mode = parse_mode(mode);
  s.read("normalize_embeddings", c.normalize_embeddings);
  const Json aug = s.child("augment");
  ConfigSection a(aug, "train.augment");
  a.read("crop_scale_lo", c.augment.crop_scale_lo);
  a.read("crop_scale_hi", c.augment.crop_scale_hi);
  a.read("crop_ratio_lo", c.augment.crop_ratio_lo);
  a.read("crop_ratio_hi", c.augment.crop_ratio_hi);
  a.read("small_crop_scale_lo", c.augment.small_crop_scale_lo);
  a.read("small_crop_scale_hi", c.augment.small_crop_scale_hi);
  a.read("flip_prob", c.augment.flip_prob);
  a.read("color_scale", c.augment.color_scale);
  a.read("color_shift", c.augment.color_shift);
  a.read("grayscale_prob", c.augment.grayscale_prob);
  a.finish();
  s.finish();
  return c;
}

}  // namespace orl
