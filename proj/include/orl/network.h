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

#ifndef ORL_NETWORK_H_
#define ORL_NETWORK_H_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace orl {

// Activations are laid out features x batch (one sample per column).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kNormEpsilon = 1e-5;

struct Affine {
  Matrix weight;  // out x in
  Matrix bias;    // out x 1
};

// Batch standardization: subtract the batch mean, divide by the batch
// standard deviation plus kNormEpsilon, then apply a learned scale and shift.
// Running statistics are for inference only and are not trained.
struct BatchStandardize {
  Matrix scale;  // n x 1
  Matrix shift;  // n x 1
  Vector running_mean;
  Vector running_var;
};

// Projector / predictor topology: affine -> standardize -> relu -> affine.
struct Mlp {
  Affine in;
  BatchStandardize norm;
  Affine out;
};

// Affine layers with relu between consecutive layers (none after the last).
struct Backbone {
  std::vector<Affine> layers;
};

enum class Branch { kGlobal = 0, kIntra = 1, kInter = 2 };

const char* branch_name(Branch b);

// Online parameters: the backbone and projector are shared by all branches,
// each branch has its own predictor.
struct NetworkParams {
  Backbone backbone;
  Mlp projector;
  std::array<Mlp, 3> predictors;

  Mlp& predictor(Branch b) { return predictors[static_cast<int>(b)]; }
  const Mlp& predictor(Branch b) const {
    return predictors[static_cast<int>(b)];
  }
};

// Target parameters mirror the online backbone and projector.
struct TargetParams {
  Backbone backbone;
  Mlp projector;
};

struct DualNetwork {
  NetworkParams online;
  TargetParams target;
  double tau = 0.99;
};

struct NetworkShape {
  int input_dim = 768;
  std::vector<int> backbone_widths = {128, 64};
  int projector_hidden = 64;
  int projector_out = 16;
  int predictor_hidden = 64;

  void validate() const;
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) affine init, unit scale, zero
// shift. The target starts as a copy of the online backbone and projector.
DualNetwork make_dual_network(const NetworkShape& shape, uint64_t seed);

int backbone_output_dim(const Backbone& b);
int input_dim(const Backbone& b);

// Trainable tensors in a fixed order with stable names.
std::vector<std::pair<std::string, Matrix*>> named_params(NetworkParams& p);
std::vector<std::pair<std::string, const Matrix*>> named_params(const NetworkParams& p);
std::vector<std::pair<std::string, Matrix*>> named_params(TargetParams& p);
std::vector<std::pair<std::string, const Matrix*>> named_params(const TargetParams& p);

// Same structure, all trainable tensors zero.
NetworkParams zeros_like(const NetworkParams& p);

struct BackboneCache {
  std::vector<Matrix> inputs;  // input of each layer
  std::vector<Matrix> pre;     // pre-activation of each hidden layer
};

struct MlpCache {
  Matrix input;
  Matrix xhat;      // standardized hidden pre-activation
  Matrix relu_in;   // scale * xhat + shift
  Matrix relu_out;
  Matrix centered;  // hidden - mean
  Vector mean;
  Vector var;       // biased batch variance
  Vector denom;     // sqrt(var) + eps
};

enum class NormMode { kBatch, kRunning };

Matrix backbone_forward(const Backbone& b, const Matrix& x, BackboneCache* cache);
// Accumulates parameter gradients into `grad` and returns d(input).
Matrix backbone_backward(const Backbone& b, const BackboneCache& cache,
                         const Matrix& dout, Backbone& grad);

Matrix mlp_forward(const Mlp& m, const Matrix& x, NormMode mode, MlpCache* cache);
Matrix mlp_backward(const Mlp& m, const MlpCache& cache, const Matrix& dout,
                    Mlp& grad);

// Exponential moving average of batch statistics into the running ones.
void update_running_stats(BatchStandardize& norm, const MlpCache& cache,
                          double momentum = 0.1);

}  // namespace orl

#endif  // ORL_NETWORK_H_
