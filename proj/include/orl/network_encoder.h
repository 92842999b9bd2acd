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

#ifndef ORL_NETWORK_ENCODER_H_
#define ORL_NETWORK_ENCODER_H_

#include <memory>
#include <string>

#include "orl/embedding.h"
#include "orl/network.h"

namespace orl {

enum class EncoderFeature { kProjector, kBackbone };

EncoderFeature parse_feature(const std::string& s);
const char* feature_name(EncoderFeature f);

// Encoder backed by the online backbone (and optionally projector) of a
// trained network. The view is pooled to the grid the backbone was trained
// on; the projector uses running statistics.
class NetworkEncoder : public Encoder {
 public:
  NetworkEncoder(NetworkParams online, int input_size, EncoderFeature feature);

  std::string name() const override;
  int input_size() const override { return input_size_; }
  int dim() const override;
  EmbeddingVector forward(const ImageBuffer& view) const override;

  int grid() const { return grid_; }

 private:
  NetworkParams online_;
  int input_size_;
  int grid_;
  EncoderFeature feature_;
};

// Throws DataError if the checkpoint cannot be read, ConfigError if
// input_size is not a multiple of the backbone grid.
std::unique_ptr<Encoder> load_network_encoder(const std::string& checkpoint,
                                              int input_size, EncoderFeature feature);

}  // namespace orl

#endif  // ORL_NETWORK_ENCODER_H_
