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

#include "bevplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "bevplan/error.hpp"

namespace bevplan {

namespace {

using Mat = Eigen::MatrixXd;
using Eigen::Index;

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void Require(bool ok, const std::string& what) {
  if (!ok) Fail(ErrorKind::kInvalidArgument, what);
}

Mat Sigmoid(const Mat& x) { return (1.0 + (-x.array()).exp()).inverse().matrix(); }
Mat Relu(const Mat& x) { return x.cwiseMax(0.0); }
Mat ReluMask(const Mat& pre, const Mat& grad) {
  return (pre.array() > 0.0).select(grad.array(), 0.0).matrix();
}

void AddBias(Mat& m, const Mat& b) { m.colwise() += b.col(0); }

struct LstmCache {
  Mat z;  // [input; h_prev]
  Mat i, f, g, o;
  Mat c, tanh_c, h;
};

void LstmForward(const Mat& w, const Mat& b, const Mat& x, const Mat& h_prev, const Mat& c_prev,
                 LstmCache& s) {
  const Index hidden = h_prev.rows();
  s.z.resize(x.rows() + hidden, x.cols());
  s.z.topRows(x.rows()) = x;
  s.z.bottomRows(hidden) = h_prev;
  Mat pre;
  pre.noalias() = w * s.z;
  AddBias(pre, b);
  s.i = Sigmoid(pre.topRows(hidden));
  s.f = Sigmoid(pre.middleRows(hidden, hidden));
  s.g = pre.middleRows(2 * hidden, hidden).array().tanh().matrix();
  s.o = Sigmoid(pre.bottomRows(hidden));
  s.c = (s.f.array() * c_prev.array() + s.i.array() * s.g.array()).matrix();
  s.tanh_c = s.c.array().tanh().matrix();
  s.h = (s.o.array() * s.tanh_c.array()).matrix();
}

/// Accumulates weight gradients; returns d[input; h_prev] and writes dc_prev.
Mat LstmBackward(const Mat& w, const LstmCache& s, const Mat& c_prev, const Mat& dh,
                 const Mat& dc, Mat& dw, Mat& db, Mat& dc_prev) {
  const Index hidden = dh.rows();
  const auto dc_total = (dc.array() + dh.array() * s.o.array() * (1.0 - s.tanh_c.array().square())).eval();
  Mat dgates(4 * hidden, dh.cols());
  dgates.topRows(hidden) = (dc_total * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
  dgates.middleRows(hidden, hidden) =
      (dc_total * c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
  dgates.middleRows(2 * hidden, hidden) =
      (dc_total * s.i.array() * (1.0 - s.g.array().square())).matrix();
  dgates.bottomRows(hidden) =
      (dh.array() * s.tanh_c.array() * s.o.array() * (1.0 - s.o.array())).matrix();
  dc_prev = (dc_total * s.f.array()).matrix();
  dw.noalias() += dgates * s.z.transpose();
  db += dgates.rowwise().sum();
  Mat dz;
  dz.noalias() = w.transpose() * dgates;
  return dz;
}

struct Batch {
  Index size = 0;
  std::vector<Mat> features;  // per encoder step, feature_dim x B
  std::vector<Mat> past;      // per encoder step, 2 x B, scaled
  Mat dest;                   // 2 x B: scaled range, bearing
  std::vector<Mat> targets;   // per decoder step, 2 x B, meters
};

Batch MakeBatch(std::span<const PlannerExample> data, std::span<const std::size_t> indices,
                const PlannerConfig& config) {
  Batch batch;
  batch.size = static_cast<Index>(indices.size());
  const Index n = batch.size;
  const auto steps = static_cast<std::size_t>(config.input_length);
  if (config.use_grids) batch.features.assign(steps, Mat(config.feature_dim, n));
  batch.past.assign(steps, Mat(2, n));
  batch.dest.resize(2, n);
  batch.targets.assign(static_cast<std::size_t>(config.horizon), Mat(2, n));
  for (Index b = 0; b < n; ++b) {
    const std::size_t idx = indices[static_cast<std::size_t>(b)];
    Require(idx < data.size(), "example index out of range");
    const PlannerExample& ex = data[idx];
    if (config.use_grids) {
      Require(ex.features.size() == steps, "planner input needs one feature vector per input step");
      for (std::size_t t = 0; t < steps; ++t) {
        Require(ex.features[t].size() == config.feature_dim, "feature length does not match config");
        batch.features[t].col(b) = ex.features[t];
      }
    }
    for (std::size_t t = 0; t < steps; ++t) {
      batch.past[t].col(b) = ex.trajectory.past[t] * config.position_scale;
    }
    batch.dest(0, b) = ex.trajectory.dest_r * config.position_scale;
    batch.dest(1, b) = ex.trajectory.dest_alpha;
    for (std::size_t t = 0; t < static_cast<std::size_t>(config.horizon); ++t) {
      batch.targets[t].col(b) = ex.trajectory.future[t];
    }
  }
  return batch;
}

struct ForwardCache {
  std::vector<Mat> pre_feat, pre_pos;
  std::vector<LstmCache> enc;
  std::vector<Mat> c_prev_enc;
  std::vector<Mat> dec_input;  // scaled feedback s_{t-1}
  std::vector<Mat> pre_dec_in;
  std::vector<LstmCache> dec;
  std::vector<Mat> c_prev_dec;
  std::vector<Mat> head_in;
  std::vector<Mat> out;  // raw 5 x B head outputs
};

void EncoderStep(const PlannerParams& p, const PlannerConfig& config, const Mat* features,
                 const Mat& past, const Mat& h, const Mat& c, ForwardCache& cache) {
  const Index n = past.cols();
  Mat x(config.EncoderInputDim(), n);
  Index row = 0;
  if (config.use_grids) {
    Mat pre;
    pre.noalias() = p.w_feat * (*features);
    AddBias(pre, p.b_feat);
    x.topRows(config.feature_embed) = Relu(pre);
    row = config.feature_embed;
    cache.pre_feat.push_back(std::move(pre));
  }
  if (config.use_past) {
    Mat pre = p.w_pos * past;
    AddBias(pre, p.b_pos);
    x.middleRows(row, config.position_embed) = Relu(pre);
    cache.pre_pos.push_back(std::move(pre));
  }
  cache.c_prev_enc.push_back(c);
  cache.enc.emplace_back();
  LstmForward(p.w_enc, p.b_enc, x, h, c, cache.enc.back());
}

ForwardCache Forward(const Batch& batch, const PlannerParams& p, const PlannerConfig& config) {
  const Index n = batch.size;
  const Index hidden = config.hidden;
  ForwardCache cache;
  Mat h = Mat::Zero(hidden, n);
  Mat c = Mat::Zero(hidden, n);
  for (std::size_t t = 0; t < static_cast<std::size_t>(config.input_length); ++t) {
    EncoderStep(p, config, config.use_grids ? &batch.features[t] : nullptr, batch.past[t], h, c, cache);
    h = cache.enc.back().h;
    c = cache.enc.back().c;
  }
  Mat s = Mat::Zero(2, n);
  for (int t = 0; t < config.horizon; ++t) {
    cache.dec_input.push_back(s * config.position_scale);
    Mat pre = p.w_dec_in * cache.dec_input.back();
    AddBias(pre, p.b_dec_in);
    const Mat a = Relu(pre);
    cache.pre_dec_in.push_back(std::move(pre));
    cache.c_prev_dec.push_back(c);
    cache.dec.emplace_back();
    LstmForward(p.w_dec, p.b_dec, a, h, c, cache.dec.back());
    h = cache.dec.back().h;
    c = cache.dec.back().c;
    Mat head(hidden + 2, n);
    head.topRows(hidden) = h;
    head.bottomRows(2) = batch.dest;
    Mat out;
    out.noalias() = p.w_out * head;
    AddBias(out, p.b_out);
    s = out.topRows(2) / config.position_scale;
    cache.head_in.push_back(std::move(head));
    cache.out.push_back(std::move(out));
  }
  return cache;
}

// The mean rows are in scaled units, like the network inputs.
GaussianParams FromRaw(const Mat& out, Index b, double scale) {
  return {out(0, b) / scale, out(1, b) / scale, std::exp(out(2, b)), std::exp(out(3, b)), std::tanh(out(4, b))};
}

/// 1 - tanh(a)^2 without the cancellation near |rho| = 1.
double OneMinusTanhSq(double a) {
  const double e = std::exp(-2.0 * std::abs(a));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

/// NLL of one step and its gradient w.r.t. the raw head outputs. `q` is
/// 1 - rho^2.
double NllAndGrad(const GaussianParams& g, double q, const Vec2& x, double* grad) {
  const double zx = (x.x() - g.mu_x) / g.sigma_x;
  const double zy = (x.y() - g.mu_y) / g.sigma_y;
  const double z = zx * zx + zy * zy - 2.0 * g.rho * zx * zy;
  if (grad != nullptr) {
    grad[0] = -(zx - g.rho * zy) / (g.sigma_x * q);
    grad[1] = -(zy - g.rho * zx) / (g.sigma_y * q);
    grad[2] = 1.0 - (zx * zx - g.rho * zx * zy) / q;
    grad[3] = 1.0 - (zy * zy - g.rho * zx * zy) / q;
    grad[4] = -g.rho - zx * zy + z * g.rho / q;
  }
  return kLog2Pi + std::log(g.sigma_x) + std::log(g.sigma_y) + 0.5 * std::log(q) + z / (2.0 * q);
}

GradientResult BackwardBatch(const Batch& batch, const ForwardCache& cache, const PlannerParams& p,
                             const PlannerConfig& config) {
  const Index n = batch.size;
  const Index hidden = config.hidden;
  GradientResult res;
  res.grad = PlannerParams::Zeros(config);
  PlannerParams& g = res.grad;

  Mat dh = Mat::Zero(hidden, n);
  Mat dc = Mat::Zero(hidden, n);
  Mat ds_next = Mat::Zero(2, n);  // dL/d mu_t through the next decoder input
  Mat dc_prev;
  double grad5[5];
  for (int t = config.horizon - 1; t >= 0; --t) {
    const auto ts = static_cast<std::size_t>(t);
    const Mat& out = cache.out[ts];
    Mat dout(5, n);
    for (Index b = 0; b < n; ++b) {
      const GaussianParams gp = FromRaw(out, b, config.position_scale);
      res.loss += NllAndGrad(gp, OneMinusTanhSq(out(4, b)), batch.targets[ts].col(b), grad5);
      for (int k = 0; k < 5; ++k) dout(k, b) = grad5[k];
    }
    dout.topRows(2) = (dout.topRows(2) + ds_next) / config.position_scale;
    g.w_out.noalias() += dout * cache.head_in[ts].transpose();
    g.b_out += dout.rowwise().sum();
    dh.noalias() += p.w_out.leftCols(hidden).transpose() * dout;
    const Mat dz = LstmBackward(p.w_dec, cache.dec[ts], cache.c_prev_dec[ts], dh, dc, g.w_dec,
                                g.b_dec, dc_prev);
    dc = dc_prev;
    dh = dz.bottomRows(hidden);
    const Mat dpre = ReluMask(cache.pre_dec_in[ts], dz.topRows(config.decoder_embed));
    g.w_dec_in.noalias() += dpre * cache.dec_input[ts].transpose();
    g.b_dec_in += dpre.rowwise().sum();
    ds_next.noalias() = config.position_scale * (p.w_dec_in.transpose() * dpre);
  }
  for (int t = config.input_length - 1; t >= 0; --t) {
    const auto ts = static_cast<std::size_t>(t);
    const Mat dz = LstmBackward(p.w_enc, cache.enc[ts], cache.c_prev_enc[ts], dh, dc, g.w_enc,
                                g.b_enc, dc_prev);
    dc = dc_prev;
    dh = dz.bottomRows(hidden);
    Index row = 0;
    if (config.use_grids) {
      const Mat dpre = ReluMask(cache.pre_feat[ts], dz.topRows(config.feature_embed));
      g.w_feat.noalias() += dpre * batch.features[ts].transpose();
      g.b_feat += dpre.rowwise().sum();
      row = config.feature_embed;
    }
    if (config.use_past) {
      const Mat dpre = ReluMask(cache.pre_pos[ts], dz.middleRows(row, config.position_embed));
      g.w_pos.noalias() += dpre * batch.past[ts].transpose();
      g.b_pos += dpre.rowwise().sum();
    }
  }
  return res;
}

void CheckParamsShape(const PlannerParams& p, const PlannerConfig& config) {
  const PlannerParams ref = PlannerParams::Zeros(config);
  const auto a = p.Tensors();
  const auto b = ref.Tensors();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i]->rows() != b[i]->rows() || a[i]->cols() != b[i]->cols()) {
      Fail(ErrorKind::kInvalidArgument,
           std::string("planner tensor ") + PlannerParams::kNames[i] + " has the wrong shape");
    }
  }
}

}  // namespace

void PlannerConfig::Validate() const {
  Require(downsample >= 1 && feature_embed >= 1 && position_embed >= 1 && decoder_embed >= 1 &&
              hidden >= 1 && horizon >= 1 && input_length >= 1,
          "planner dimensions must be at least 1");
  Require(!use_grids || feature_dim >= 1, "feature dimension must be at least 1");
  Require(use_grids || use_past, "planner needs grids or past positions as input");
  Require(position_scale > 0.0, "position scale must be positive");
  Require(horizon <= kFutureSteps && input_length == kPastSteps,
          "planner horizon/input length exceed the sample layout");
}

const std::array<const char*, PlannerParams::kTensorCount> PlannerParams::kNames = {
    "w_feat", "b_feat", "w_pos", "b_pos", "w_enc", "b_enc",
    "w_dec_in", "b_dec_in", "w_dec", "b_dec", "w_out", "b_out"};

std::array<Eigen::MatrixXd*, PlannerParams::kTensorCount> PlannerParams::Tensors() {
  return {&w_feat, &b_feat, &w_pos, &b_pos, &w_enc, &b_enc,
          &w_dec_in, &b_dec_in, &w_dec, &b_dec, &w_out, &b_out};
}

std::array<const Eigen::MatrixXd*, PlannerParams::kTensorCount> PlannerParams::Tensors() const {
  return {&w_feat, &b_feat, &w_pos, &b_pos, &w_enc, &b_enc,
          &w_dec_in, &b_dec_in, &w_dec, &b_dec, &w_out, &b_out};
}

PlannerParams PlannerParams::Zeros(const PlannerConfig& config) {
  config.Validate();
  const Index h = config.hidden;
  PlannerParams p;
  if (config.use_grids) {
    p.w_feat = Mat::Zero(config.feature_embed, config.feature_dim);
    p.b_feat = Mat::Zero(config.feature_embed, 1);
  }
  if (config.use_past) {
    p.w_pos = Mat::Zero(config.position_embed, 2);
    p.b_pos = Mat::Zero(config.position_embed, 1);
  }
  p.w_enc = Mat::Zero(4 * h, config.EncoderInputDim() + h);
  p.b_enc = Mat::Zero(4 * h, 1);
  p.w_dec_in = Mat::Zero(config.decoder_embed, 2);
  p.b_dec_in = Mat::Zero(config.decoder_embed, 1);
  p.w_dec = Mat::Zero(4 * h, config.decoder_embed + h);
  p.b_dec = Mat::Zero(4 * h, 1);
  p.w_out = Mat::Zero(5, h + 2);
  p.b_out = Mat::Zero(5, 1);
  return p;
}

PlannerParams PlannerParams::Random(const PlannerConfig& config, Rng& rng) {
  PlannerParams p = Zeros(config);
  auto tensors = p.Tensors();
  for (std::size_t k = 0; k < tensors.size(); k += 2) {
    Mat& w = *tensors[k];
    if (w.size() == 0) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    // Column-major fill order is part of the determinism contract.
    for (Index j = 0; j < w.cols(); ++j) {
      for (Index i = 0; i < w.rows(); ++i) w(i, j) = rng.Uniform(-bound, bound);
    }
  }
  const Index h = config.hidden;
  p.b_enc.middleRows(h, h).setOnes();
  p.b_dec.middleRows(h, h).setOnes();
  return p;
}

bool PlannerParams::AllFinite() const {
  for (const Mat* m : Tensors()) {
    if (!m->allFinite()) return false;
  }
  return true;
}

std::size_t PlannerParams::ParameterCount() const {
  std::size_t n = 0;
  for (const Mat* m : Tensors()) n += static_cast<std::size_t>(m->size());
  return n;
}

PlannerParams& PlannerParams::operator+=(const PlannerParams& other) {
  auto a = Tensors();
  const auto b = other.Tensors();
  for (std::size_t i = 0; i < a.size(); ++i) *a[i] += *b[i];
  return *this;
}

PlannerParams& PlannerParams::operator*=(double s) {
  for (Mat* m : Tensors()) *m *= s;
  return *this;
}

void GaussianParams::Validate() const {
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0) || !std::isfinite(sigma_x) || !std::isfinite(sigma_y) ||
      !(std::abs(rho) < 1.0) || !std::isfinite(mu_x) || !std::isfinite(mu_y)) {
    Fail(ErrorKind::kInvalidCovariance, "Gaussian needs sigma > 0 and |rho| < 1");
  }
}

int FeatureLength(int rows, int cols, int downsample) {
  Require(downsample >= 1, "downsample must be at least 1");
  return 2 * (rows / downsample) * (cols / downsample);
}

Eigen::VectorXd FeaturizeFrame(const GridFrame& frame, int downsample) {
  Require(downsample >= 1, "downsample must be at least 1");
  if (!frame.drivable.same_shape(frame.vehicles)) {
    Fail(ErrorKind::kSpecMismatch, "drivable and vehicle channels differ in size");
  }
  const int br = frame.drivable.rows() / downsample;
  const int bc = frame.drivable.cols() / downsample;
  Eigen::VectorXd out(2 * br * bc);
  const double inv_area = 1.0 / (static_cast<double>(downsample) * downsample);
  const RealGrid* channels[2] = {&frame.drivable, &frame.vehicles};
  Index k = 0;
  for (const RealGrid* ch : channels) {
    for (int i = 0; i < br; ++i) {
      for (int j = 0; j < bc; ++j) {
        double sum = 0.0;
        for (int r = i * downsample; r < (i + 1) * downsample; ++r) {
          const double* row = ch->data() + static_cast<std::size_t>(r) * ch->cols();
          for (int c = j * downsample; c < (j + 1) * downsample; ++c) sum += row[c];
        }
        out(k++) = sum * inv_area;
      }
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> Featurize(std::span<const GridFrame> sequence, int downsample) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(sequence.size());
  for (const GridFrame& f : sequence) {
    if (!sequence.empty() && !f.drivable.same_shape(sequence.front().drivable)) {
      Fail(ErrorKind::kSpecMismatch, "grids of one sequence must share their layout");
    }
    out.push_back(FeaturizeFrame(f, downsample));
  }
  return out;
}

EncoderState Encode(std::span<const Eigen::VectorXd> features, std::span<const Vec2> past,
                    const PlannerParams& params, const PlannerConfig& config) {
  config.Validate();
  CheckParamsShape(params, config);
  Require(past.size() == static_cast<std::size_t>(config.input_length),
          "encoder needs one past position per input step");
  PlannerExample ex;
  ex.features.assign(features.begin(), features.end());
  std::copy(past.begin(), past.end(), ex.trajectory.past.begin());
  const std::size_t idx = 0;
  const Batch batch = MakeBatch(std::span<const PlannerExample>(&ex, 1), std::span(&idx, 1), config);
  const Index hidden = config.hidden;
  ForwardCache cache;
  Mat h = Mat::Zero(hidden, 1);
  Mat c = Mat::Zero(hidden, 1);
  for (std::size_t t = 0; t < static_cast<std::size_t>(config.input_length); ++t) {
    EncoderStep(params, config, config.use_grids ? &batch.features[t] : nullptr, batch.past[t], h, c,
                cache);
    h = cache.enc.back().h;
    c = cache.enc.back().c;
  }
  return {h.col(0), c.col(0)};
}

std::vector<GaussianParams> Decode(const EncoderState& state, double dest_r, double dest_alpha,
                                   const PlannerParams& p, const PlannerConfig& config) {
  config.Validate();
  CheckParamsShape(p, config);
  Require(state.h.size() == config.hidden && state.c.size() == config.hidden,
          "decoder state size does not match the hidden size");
  Mat h = state.h;
  Mat c = state.c;
  Mat dest(2, 1);
  dest << dest_r * config.position_scale, dest_alpha;
  std::vector<GaussianParams> out;
  Mat s = Mat::Zero(2, 1);
  LstmCache cell;
  for (int t = 0; t < config.horizon; ++t) {
    Mat pre = p.w_dec_in * (s * config.position_scale);
    AddBias(pre, p.b_dec_in);
    LstmForward(p.w_dec, p.b_dec, Relu(pre), h, c, cell);
    h = cell.h;
    c = cell.c;
    Mat head(config.hidden + 2, 1);
    head.topRows(config.hidden) = h;
    head.bottomRows(2) = dest;
    Mat raw = p.w_out * head;
    AddBias(raw, p.b_out);
    out.push_back(FromRaw(raw, 0, config.position_scale));
    s = raw.topRows(2) / config.position_scale;
  }
  return out;
}

std::vector<std::vector<GaussianParams>> PredictBatch(std::span<const PlannerExample> data,
                                                      const PlannerParams& params,
                                                      const PlannerConfig& config) {
  config.Validate();
  CheckParamsShape(params, config);
  std::vector<std::vector<GaussianParams>> out;
  out.reserve(data.size());
  constexpr std::size_t kChunk = 64;
  for (std::size_t start = 0; start < data.size(); start += kChunk) {
    std::vector<std::size_t> idx;
    for (std::size_t i = start; i < std::min(data.size(), start + kChunk); ++i) idx.push_back(i);
    const Batch batch = MakeBatch(data, idx, config);
    const ForwardCache cache = Forward(batch, params, config);
    for (Index b = 0; b < batch.size; ++b) {
      std::vector<GaussianParams> traj;
      for (const Mat& raw : cache.out) traj.push_back(FromRaw(raw, b, config.position_scale));
      out.push_back(std::move(traj));
    }
  }
  return out;
}

std::vector<GaussianParams> Predict(const PlannerExample& example, const PlannerParams& params,
                                    const PlannerConfig& config) {
  return PredictBatch(std::span<const PlannerExample>(&example, 1), params, config).front();
}

double GaussianNll(const GaussianParams& g, const Vec2& x) {
  g.Validate();
  return NllAndGrad(g, (1.0 - g.rho) * (1.0 + g.rho), x, nullptr);
}

double NllLoss(std::span<const GaussianParams> preds, std::span<const Vec2> gt) {
  Require(preds.size() == gt.size(), "prediction and ground truth lengths differ");
  double total = 0.0;
  for (std::size_t t = 0; t < preds.size(); ++t) total += GaussianNll(preds[t], gt[t]);
  return total;
}

GradientResult BatchGradient(std::span<const PlannerExample> data, std::vector<std::size_t> indices,
                             const PlannerParams& params, const PlannerConfig& config) {
  config.Validate();
  CheckParamsShape(params, config);
  std::sort(indices.begin(), indices.end());
  const Batch batch = MakeBatch(data, indices, config);
  const ForwardCache cache = Forward(batch, params, config);
  return BackwardBatch(batch, cache, params, config);
}

GradientResult Backward(const PlannerExample& example, const PlannerParams& params,
                        const PlannerConfig& config) {
  return BatchGradient(std::span<const PlannerExample>(&example, 1), {0}, params, config);
}

TrainResult Train(std::span<const PlannerExample> data, const PlannerConfig& config,
                  const TrainHyper& hyper, std::uint64_t seed, const EpochCallback& on_epoch,
                  const PlannerParams* init) {
  config.Validate();
  Require(!data.empty(), "training set is empty");
  Require(hyper.batch_size >= 1 && hyper.epochs >= 0, "batch size and epochs");
  Require(hyper.learning_rate >= 0.0 && hyper.momentum >= 0.0 && hyper.momentum < 1.0,
          "learning rate and momentum");
  TrainResult result;
  if (init != nullptr) {
    CheckParamsShape(*init, config);
    result.params = *init;
  } else {
    Rng rng = Rng::Stream(seed, "init");
    result.params = PlannerParams::Random(config, rng);
  }
  PlannerParams velocity = PlannerParams::Zeros(config);
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto batch = static_cast<std::size_t>(hyper.batch_size);

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng shuffle = Rng::Stream(seed, "shuffle", static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.Below(i)]);
    double epoch_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + batch)));
      const std::size_t count = idx.size();
      GradientResult gr = BatchGradient(data, std::move(idx), result.params, config);
      if (!std::isfinite(gr.loss) || !gr.grad.AllFinite()) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << ", batch starting at " << start
            << " (batch loss " << gr.loss << ", lr " << hyper.learning_rate << ")";
        Fail(ErrorKind::kNumericFailure, msg.str());
      }
      epoch_sum += gr.loss;
      gr.grad *= 1.0 / static_cast<double>(count);
      if (hyper.clip_norm > 0.0) {
        double sq = 0.0;
        for (const Mat* m : gr.grad.Tensors()) sq += m->squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > hyper.clip_norm) gr.grad *= hyper.clip_norm / norm;
      }
      auto vel = velocity.Tensors();
      auto par = result.params.Tensors();
      const auto grad = gr.grad.Tensors();
      for (std::size_t k = 0; k < vel.size(); ++k) {
        *vel[k] = hyper.momentum * *vel[k] + *grad[k];
        *par[k] -= hyper.learning_rate * *vel[k];
      }
    }
    const double mean = epoch_sum / static_cast<double>(data.size());
    result.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

Vec2 SamplePosition(const GaussianParams& g, Rng& rng) {
  g.Validate();
  const double z1 = rng.Normal();
  const double z2 = rng.Normal();
  // Cholesky of [[sx^2, rho sx sy], [rho sx sy, sy^2]].
  const double l11 = g.sigma_x;
  const double l21 = g.rho * g.sigma_y;
  const double l22 = g.sigma_y * std::sqrt((1.0 - g.rho) * (1.0 + g.rho));
  return {g.mu_x + l11 * z1, g.mu_y + l21 * z1 + l22 * z2};
}

}  // namespace bevplan
