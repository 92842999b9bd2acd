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

#include "orl/network_encoder.h"

#include <cmath>

#include "orl/augment.h"
#include "orl/checkpoint.h"
#include "orl/error.h"

namespace orl {

EncoderFeature parse_feature(const std::string& s) {
  if (s == "projector") return EncoderFeature::kProjector;
  if (s == "backbone") return EncoderFeature::kBackbone;
  throw ConfigError("unknown encoder feature: " + s);
}

const char* feature_name(EncoderFeature f) {
  return f == EncoderFeature::kProjector ? "projector" : "backbone";
}

NetworkEncoder::NetworkEncoder(NetworkParams online, int input_size,
                               EncoderFeature feature)
    : online_(std::move(online)), input_size_(input_size), feature_(feature) {
  const int in = input_dim(online_.backbone);
  grid_ = static_cast<int>(std::lround(std::sqrt(in / 3.0)));
  if (grid_ <= 0 || grid_ * grid_ * 3 != in) {
    throw DataError("backbone input " + std::to_string(in) +
                    " is not a square RGB grid");
  }
  if (input_size_ < 8 || input_size_ % grid_ != 0) {
    throw ConfigError("encoder input_size " + std::to_string(input_size_) +
                      " must be a multiple of the backbone grid " +
                      std::to_string(grid_));
  }
}

std::string NetworkEncoder::name() const {
  return std::string("network-") + feature_name(feature_);
}

int NetworkEncoder::dim() const {
  return feature_ == EncoderFeature::kProjector
             ? static_cast<int>(online_.projector.out.weight.rows())
             : backbone_output_dim(online_.backbone);
}

EmbeddingVector NetworkEncoder::forward(const ImageBuffer& view) const {
  if (view.width() != input_size_ || view.height() != input_size_) {
    throw DataError("encoder expects a " + std::to_string(input_size_) +
                    " px square view");
  }
  const std::vector<double> x = pool_to_grid(view, grid_);
  const Matrix in = Eigen::Map<const Matrix>(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  Matrix h = backbone_forward(online_.backbone, in, nullptr);
  if (feature_ == EncoderFeature::kProjector) {
    h = mlp_forward(online_.projector, h, NormMode::kRunning, nullptr);
  }
  return EmbeddingVector(h.data(), h.data() + h.size());
}

std::unique_ptr<Encoder> load_network_encoder(const std::string& checkpoint,
                                              int input_size, EncoderFeature feature) {
  Checkpoint ck = read_checkpoint(checkpoint);
  return std::make_unique<NetworkEncoder>(std::move(ck.net.online), input_size,
                                          feature);
}

}  // namespace orl
