// Copyright 2026 The bevplan Authors. All Rights Reserved.
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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bevplan/grid.hpp"
#include "bevplan/random.hpp"
#include "bevplan/trajectory.hpp"

namespace bevplan {

/// Encoder-decoder LSTM sizes. Defaults: 1000 x 550 grids pooled by 40 into
/// 25 x 13 blocks per channel, i.e. 650 features per step.
struct PlannerConfig {
  int feature_dim = 650;
  int downsample = 40;
  int feature_embed = 64;
  int position_embed = 16;
  int decoder_embed = 16;
  int hidden = 128;
  int horizon = kFutureSteps;
  int input_length = kPastSteps;
  bool use_grids = true;
  bool use_past = true;
  /// Positions and the destination range are multiplied by this before they
  /// enter the net; the head's mean rows are divided by it.
  double position_scale = 0.1;

  void Validate() const;
  int EncoderInputDim() const {
    return (use_grids ? feature_embed : 0) + (use_past ? position_embed : 0);
  }
  friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

/// Weights and biases; biases are single-column matrices. Tensors of a
/// disabled input branch are empty.
struct PlannerParams {
  Eigen::MatrixXd w_feat, b_feat;      // feature embedding
  Eigen::MatrixXd w_pos, b_pos;        // past-position embedding
  Eigen::MatrixXd w_enc, b_enc;        // encoder LSTM, gates stacked i, f, g, o
  Eigen::MatrixXd w_dec_in, b_dec_in;  // decoder position embedding
  Eigen::MatrixXd w_dec, b_dec;        // decoder LSTM
  Eigen::MatrixXd w_out, b_out;        // Gaussian head, rows mu_x, mu_y (scaled), log sx, log sy, atanh rho

  static constexpr int kTensorCount = 12;
  static const std::array<const char*, kTensorCount> kNames;

  std::array<Eigen::MatrixXd*, kTensorCount> Tensors();
  std::array<const Eigen::MatrixXd*, kTensorCount> Tensors() const;

  static PlannerParams Zeros(const PlannerConfig& config);
  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases except a
  /// forget-gate bias of 1.
  static PlannerParams Random(const PlannerConfig& config, Rng& rng);

  bool AllFinite() const;
  std::size_t ParameterCount() const;
  PlannerParams& operator+=(const PlannerParams& other);
  PlannerParams& operator*=(double s);
};

struct GaussianParams {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double rho = 0.0;

  void Validate() const;
  Vec2 mean() const { return {mu_x, mu_y}; }
};

/// Bird-eye-view input of one time step.
struct GridFrame {
  RealGrid drivable;
  RealGrid vehicles;
};

/// Block-mean pooling by `downsample` of both channels, concatenated
/// (drivable first) and flattened row-major. Partial edge blocks are dropped.
Eigen::VectorXd FeaturizeFrame(const GridFrame& frame, int downsample);
std::vector<Eigen::VectorXd> Featurize(std::span<const GridFrame> sequence, int downsample);
/// Pooled length for a rows x cols two-channel grid.
int FeatureLength(int rows, int cols, int downsample);

/// One planner input: per-step features (empty when grids are unused) and
/// the trajectory context and targets.
struct PlannerExample {
  std::vector<Eigen::VectorXd> features;
  TrajectorySample trajectory;
};

struct EncoderState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

EncoderState Encode(std::span<const Eigen::VectorXd> features, std::span<const Vec2> past,
                    const PlannerParams& params, const PlannerConfig& config);

/// Feeds each step's mean back as the next decoder input, starting from the
/// current position (0, 0).
std::vector<GaussianParams> Decode(const EncoderState& state, double dest_r, double dest_alpha,
                                   const PlannerParams& params, const PlannerConfig& config);

std::vector<GaussianParams> Predict(const PlannerExample& example, const PlannerParams& params,
                                    const PlannerConfig& config);

/// -log N(x; mu, sigma, rho).
double GaussianNll(const GaussianParams& g, const Vec2& x);
double NllLoss(std::span<const GaussianParams> preds, std::span<const Vec2> gt);

struct GradientResult {
  double loss = 0.0;  // summed over the examples
  PlannerParams grad;
};

/// Exact gradient of the summed NLL of one example.
GradientResult Backward(const PlannerExample& example, const PlannerParams& params,
                        const PlannerConfig& config);

/// Summed loss and gradient over `indices`. Indices are sorted first, so
/// any permutation of the same batch gives bit-identical results.
GradientResult BatchGradient(std::span<const PlannerExample> data, std::vector<std::size_t> indices,
                             const PlannerParams& params, const PlannerConfig& config);

/// Batched Predict; same numbers as calling Predict per example.
std::vector<std::vector<GaussianParams>> PredictBatch(std::span<const PlannerExample> data,
                                                      const PlannerParams& params,
                                                      const PlannerConfig& config);

struct TrainHyper {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int batch_size = 10;
  int epochs = 200;
  /// Rescale the batch gradient to at most this L2 norm; 0 disables.
  double clip_norm = 0.0;
};

struct TrainResult {
  PlannerParams params;
  std::vector<double> epoch_loss;  // mean per-example NLL seen during each epoch
};

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

/// Minibatch SGD with classical momentum on the mean batch NLL. Weight
/// init and shuffling draw from named streams of `seed`.
TrainResult Train(std::span<const PlannerExample> data, const PlannerConfig& config,
                  const TrainHyper& hyper, std::uint64_t seed, const EpochCallback& on_epoch = {},
                  const PlannerParams* init = nullptr);

/// Draw from the bivariate Gaussian via the Cholesky factor of its covariance.
Vec2 SamplePosition(const GaussianParams& g, Rng& rng);

}  // namespace bevplan
