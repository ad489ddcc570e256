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

#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "bevplan/error.hpp"
#include "bevplan/planner.hpp"
#include "bevplan/random.hpp"

namespace bevplan {
namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

PlannerConfig SmallConfig() {
  PlannerConfig c;
  c.feature_dim = 6;
  c.feature_embed = 3;
  c.position_embed = 2;
  c.decoder_embed = 3;
  c.hidden = 4;
  return c;
}

PlannerExample RandomExample(const PlannerConfig& c, Rng& rng) {
  PlannerExample ex;
  for (int t = 0; t < c.input_length; ++t) {
    Eigen::VectorXd f(c.feature_dim);
    for (int i = 0; i < c.feature_dim; ++i) f(i) = rng.Uniform();
    ex.features.push_back(f);
  }
  const double v = rng.Uniform(3, 12);
  for (int i = 0; i < kPastSteps; ++i) {
    ex.trajectory.past[static_cast<std::size_t>(i)] = Vec2(0.5 * v * (i - 5), 0.1 * rng.Normal());
  }
  for (int i = 0; i < kFutureSteps; ++i) {
    ex.trajectory.future[static_cast<std::size_t>(i)] = Vec2(0.5 * v * (i + 1), 0.2 * rng.Normal() * (i + 1));
  }
  ex.trajectory.destination = Vec2(3 * v, rng.Normal());
  const auto polar = ToPolar(ex.trajectory.destination);
  ex.trajectory.dest_r = polar[0];
  ex.trajectory.dest_alpha = polar[1];
  return ex;
}

// ---- scalar reference implementation --------------------------------------

double Sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// One LSTM step written out entry by entry.
void ScalarLstm(const Eigen::MatrixXd& w, const Eigen::MatrixXd& b, const std::vector<double>& x,
                std::vector<double>& h, std::vector<double>& c) {
  const int n = static_cast<int>(h.size());
  std::vector<double> z = x;
  z.insert(z.end(), h.begin(), h.end());
  std::vector<double> nh(n), nc(n);
  for (int k = 0; k < n; ++k) {
    double pre[4];
    for (int gate = 0; gate < 4; ++gate) {
      double s = b(gate * n + k, 0);
      for (std::size_t j = 0; j < z.size(); ++j) s += w(gate * n + k, static_cast<Eigen::Index>(j)) * z[j];
      pre[gate] = s;
    }
    nc[k] = Sig(pre[1]) * c[k] + Sig(pre[0]) * std::tanh(pre[2]);
    nh[k] = Sig(pre[3]) * std::tanh(nc[k]);
  }
  h = nh;
  c = nc;
}

std::vector<double> Dense(const Eigen::MatrixXd& w, const Eigen::MatrixXd& b, const std::vector<double>& x,
                          bool relu) {
  std::vector<double> y(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double s = b(i, 0);
    for (Eigen::Index j = 0; j < w.cols(); ++j) s += w(i, j) * x[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] = relu ? std::max(0.0, s) : s;
  }
  return y;
}

struct ScalarState {
  std::vector<double> h, c;
};

ScalarState ScalarEncode(const PlannerExample& ex, const PlannerParams& p, const PlannerConfig& cfg) {
  ScalarState s{std::vector<double>(cfg.hidden, 0.0), std::vector<double>(cfg.hidden, 0.0)};
  for (int t = 0; t < cfg.input_length; ++t) {
    std::vector<double> f(ex.features[t].data(), ex.features[t].data() + ex.features[t].size());
    const Vec2 pos = ex.trajectory.past[static_cast<std::size_t>(t)] * cfg.position_scale;
    std::vector<double> x = Dense(p.w_feat, p.b_feat, f, true);
    const auto a = Dense(p.w_pos, p.b_pos, {pos.x(), pos.y()}, true);
    x.insert(x.end(), a.begin(), a.end());
    ScalarLstm(p.w_enc, p.b_enc, x, s.h, s.c);
  }
  return s;
}

/// Decoder unrolled by hand; `perturb` is added to the fed-back mean after
/// step 1.
std::vector<GaussianParams> ScalarDecode(ScalarState s, double r, double alpha, const PlannerParams& p,
                                         const PlannerConfig& cfg, int steps, Vec2 perturb = Vec2::Zero()) {
  std::vector<GaussianParams> out;
  Vec2 prev = Vec2::Zero();
  for (int t = 0; t < steps; ++t) {
    const auto a = Dense(p.w_dec_in, p.b_dec_in, {prev.x() * cfg.position_scale, prev.y() * cfg.position_scale}, true);
    ScalarLstm(p.w_dec, p.b_dec, a, s.h, s.c);
    std::vector<double> head = s.h;
    head.push_back(r * cfg.position_scale);
    head.push_back(alpha);
    const auto o = Dense(p.w_out, p.b_out, head, false);
    GaussianParams g{o[0] / cfg.position_scale, o[1] / cfg.position_scale, std::exp(o[2]), std::exp(o[3]),
                     std::tanh(o[4])};
    out.push_back(g);
    prev = g.mean();
    if (t == 0) prev += perturb;
  }
  return out;
}

double MatrixFormNll(const GaussianParams& g, const Vec2& x) {
  Eigen::Matrix2d cov;
  cov << g.sigma_x * g.sigma_x, g.rho * g.sigma_x * g.sigma_y, g.rho * g.sigma_x * g.sigma_y,
      g.sigma_y * g.sigma_y;
  const Vec2 d = x - g.mean();
  const double density =
      std::exp(-0.5 * d.dot(cov.inverse() * d)) / (2.0 * std::numbers::pi * std::sqrt(cov.determinant()));
  return -std::log(density);
}

// ---- featurize ---------------------------------------------------------------

TEST(Featurize, ZerosAndOnes) {
  GridFrame f{RealGrid(1000, 550, 0.0), RealGrid(1000, 550, 0.0)};
  EXPECT_EQ(FeaturizeFrame(f, 40), Eigen::VectorXd::Zero(650));
  f.drivable = RealGrid(1000, 550, 1.0);
  const Eigen::VectorXd v = FeaturizeFrame(f, 40);
  EXPECT_EQ(v.head(325), Eigen::VectorXd::Ones(325));
  EXPECT_EQ(v.tail(325), Eigen::VectorXd::Zero(325));
  EXPECT_EQ(FeatureLength(1000, 550, 40), 650);
}

TEST(Featurize, MatchesBlockMeanOracle) {
  Rng rng(3);
  GridFrame f{RealGrid(47, 31), RealGrid(47, 31)};
  for (double& v : f.drivable.values()) v = rng.Uniform();
  for (double& v : f.vehicles.values()) v = rng.Uniform() < 0.2;
  const int d = 5;
  const Eigen::VectorXd got = FeaturizeFrame(f, d);
  ASSERT_EQ(got.size(), 2 * (47 / d) * (31 / d));
  int k = 0;
  for (const RealGrid* ch : {&f.drivable, &f.vehicles}) {
    for (int i = 0; i < 47 / d; ++i) {
      for (int j = 0; j < 31 / d; ++j) {
        double s = 0;
        for (int r = 0; r < d; ++r) {
          for (int c = 0; c < d; ++c) s += (*ch)(i * d + r, j * d + c);
        }
        EXPECT_NEAR(got(k++), s / (d * d), 1e-14);
      }
    }
  }
}

TEST(Featurize, MismatchedGridsRejected) {
  const GridFrame a{RealGrid(40, 40, 0.0), RealGrid(40, 40, 0.0)};
  const GridFrame b{RealGrid(80, 40, 0.0), RealGrid(80, 40, 0.0)};
  const std::vector<GridFrame> seq = {a, b};
  try {
    Featurize(seq, 4);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSpecMismatch);
  }
  EXPECT_THROW(FeaturizeFrame({RealGrid(4, 4), RealGrid(5, 4)}, 2), Error);
}

// ---- encoder / decoder ------------------------------------------------------

TEST(Encode, ZeroWeightsGiveZeroState) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(1);
  const PlannerExample ex = RandomExample(cfg, rng);
  const EncoderState s = Encode(ex.features, ex.trajectory.past, PlannerParams::Zeros(cfg), cfg);
  EXPECT_EQ(s.h, Eigen::VectorXd::Zero(cfg.hidden));
  EXPECT_EQ(s.c, Eigen::VectorXd::Zero(cfg.hidden));
}

TEST(Encode, MatchesScalarCellEquations) {
  const PlannerConfig cfg = SmallConfig();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const PlannerParams p = PlannerParams::Random(cfg, rng);
    const PlannerExample ex = RandomExample(cfg, rng);
    const EncoderState s = Encode(ex.features, ex.trajectory.past, p, cfg);
    const ScalarState ref = ScalarEncode(ex, p, cfg);
    for (int k = 0; k < cfg.hidden; ++k) {
      EXPECT_NEAR(s.h(k), ref.h[k], 1e-14);
      EXPECT_NEAR(s.c(k), ref.c[k], 1e-14);
    }
  }
}

TEST(Encode, ShapeMismatchRejected) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(1);
  PlannerExample ex = RandomExample(cfg, rng);
  ex.features.pop_back();
  EXPECT_THROW(Encode(ex.features, ex.trajectory.past, PlannerParams::Zeros(cfg), cfg), Error);
  PlannerConfig other = cfg;
  other.hidden = 5;
  ex = RandomExample(cfg, rng);
  EXPECT_THROW(Encode(ex.features, ex.trajectory.past, PlannerParams::Zeros(other), cfg), Error);
}

TEST(Decode, ZeroWeightsGiveUnitGaussians) {
  const PlannerConfig cfg = SmallConfig();
  const EncoderState s{Eigen::VectorXd::Zero(cfg.hidden), Eigen::VectorXd::Zero(cfg.hidden)};
  const auto out = Decode(s, 20.0, 0.1, PlannerParams::Zeros(cfg), cfg);
  ASSERT_EQ(out.size(), 5u);
  for (const GaussianParams& g : out) {
    EXPECT_EQ(g.mu_x, 0.0);
    EXPECT_EQ(g.mu_y, 0.0);
    EXPECT_EQ(g.sigma_x, 1.0);
    EXPECT_EQ(g.sigma_y, 1.0);
    EXPECT_EQ(g.rho, 0.0);
  }
}

TEST(Decode, MatchesManualUnroll) {
  const PlannerConfig cfg = SmallConfig();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed + 10);
    const PlannerParams p = PlannerParams::Random(cfg, rng);
    const PlannerExample ex = RandomExample(cfg, rng);
    const EncoderState s = Encode(ex.features, ex.trajectory.past, p, cfg);
    const ScalarState ss{{s.h.data(), s.h.data() + s.h.size()}, {s.c.data(), s.c.data() + s.c.size()}};
    const auto got = Decode(s, ex.trajectory.dest_r, ex.trajectory.dest_alpha, p, cfg);
    const auto ref = ScalarDecode(ss, ex.trajectory.dest_r, ex.trajectory.dest_alpha, p, cfg, 2);
    for (int t = 0; t < 2; ++t) {
      EXPECT_NEAR(got[t].mu_x, ref[t].mu_x, 1e-12);
      EXPECT_NEAR(got[t].mu_y, ref[t].mu_y, 1e-12);
      EXPECT_NEAR(got[t].sigma_x, ref[t].sigma_x, 1e-12);
      EXPECT_NEAR(got[t].sigma_y, ref[t].sigma_y, 1e-12);
      EXPECT_NEAR(got[t].rho, ref[t].rho, 1e-12);
    }
  }
}

TEST(Decode, FedBackMeanDrivesLaterSteps) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(77);
  const PlannerParams p = PlannerParams::Random(cfg, rng);
  const PlannerExample ex = RandomExample(cfg, rng);
  const ScalarState s = ScalarEncode(ex, p, cfg);
  const auto base = ScalarDecode(s, 20, 0.1, p, cfg, 5);
  const auto bumped = ScalarDecode(s, 20, 0.1, p, cfg, 5, Vec2(5.0, -5.0));
  EXPECT_EQ(base[0].mu_x, bumped[0].mu_x);
  for (int t = 1; t < 5; ++t) {
    EXPECT_NE(base[t].mu_x, bumped[t].mu_x) << "step " << t + 1;
  }
}

TEST(Predict, BatchMatchesSingle) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(4);
  const PlannerParams p = PlannerParams::Random(cfg, rng);
  std::vector<PlannerExample> data;
  for (int i = 0; i < 7; ++i) data.push_back(RandomExample(cfg, rng));
  const auto batch = PredictBatch(data, p, cfg);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto single = Predict(data[i], p, cfg);
    const EncoderState s = Encode(data[i].features, data[i].trajectory.past, p, cfg);
    const auto dec = Decode(s, data[i].trajectory.dest_r, data[i].trajectory.dest_alpha, p, cfg);
    for (int t = 0; t < 5; ++t) {
      EXPECT_NEAR(batch[i][t].mu_x, single[t].mu_x, 1e-12);
      EXPECT_NEAR(batch[i][t].sigma_y, single[t].sigma_y, 1e-12);
      EXPECT_NEAR(dec[t].mu_y, single[t].mu_y, 1e-12);
      EXPECT_NEAR(dec[t].rho, single[t].rho, 1e-12);
    }
  }
}

// ---- loss -------------------------------------------------------------------

TEST(Nll, AtMeanWithUnitSigma) {
  std::vector<GaussianParams> preds(5);
  std::vector<Vec2> gt(5);
  for (int t = 0; t < 5; ++t) {
    preds[t].mu_x = t;
    preds[t].mu_y = -t;
    gt[t] = Vec2(t, -t);
  }
  EXPECT_NEAR(NllLoss(preds, gt), 5 * kLog2Pi, 1e-12);
  EXPECT_NEAR(kLog2Pi, 1.837877, 1e-6);
}

TEST(Nll, FactorizesWithoutCorrelation) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const GaussianParams g{rng.Normal(), rng.Normal(), rng.Uniform(0.2, 3), rng.Uniform(0.2, 3), 0.0};
    const Vec2 x(rng.Normal() * 2, rng.Normal() * 2);
    auto uni = [](double x, double mu, double s) {
      return 0.5 * std::log(2 * std::numbers::pi) + std::log(s) + 0.5 * (x - mu) * (x - mu) / (s * s);
    };
    EXPECT_NEAR(GaussianNll(g, x), uni(x.x(), g.mu_x, g.sigma_x) + uni(x.y(), g.mu_y, g.sigma_y), 1e-12);
  }
}

TEST(Nll, MatchesMatrixFormDensity) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const GaussianParams g{rng.Normal(), rng.Normal(), rng.Uniform(0.2, 3), rng.Uniform(0.2, 3),
                           rng.Uniform(-0.95, 0.95)};
    const Vec2 x(g.mu_x + rng.Normal(), g.mu_y + rng.Normal());
    EXPECT_NEAR(GaussianNll(g, x), MatrixFormNll(g, x), 1e-10);
  }
}

TEST(Nll, InvalidCovarianceRejected) {
  const Vec2 x(0, 0);
  for (const GaussianParams& g : {GaussianParams{0, 0, 0.0, 1, 0}, GaussianParams{0, 0, 1, -1, 0},
                                  GaussianParams{0, 0, 1, 1, 1.0}}) {
    try {
      GaussianNll(g, x);
      FAIL() << "expected an error";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInvalidCovariance);
    }
  }
  const std::vector<GaussianParams> two(2);
  const std::vector<Vec2> three(3, Vec2::Zero());
  EXPECT_THROW(NllLoss(two, three), Error);
}

// ---- gradients --------------------------------------------------------------

double LossOf(const PlannerExample& ex, const PlannerParams& p, const PlannerConfig& cfg) {
  const auto pred = Predict(ex, p, cfg);
  return NllLoss(pred, std::vector<Vec2>(ex.trajectory.future.begin(), ex.trajectory.future.end()));
}

void CheckGradient(const PlannerConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  PlannerParams p = PlannerParams::Random(cfg, rng);
  // Zero biases put the first decoder embedding exactly on the ReLU kink.
  for (Eigen::MatrixXd* t : p.Tensors()) {
    if (t->cols() == 1) {
      for (Eigen::Index i = 0; i < t->size(); ++i) t->data()[i] += rng.Uniform(-0.3, 0.3);
    }
  }
  const PlannerExample ex = RandomExample(cfg, rng);
  const GradientResult g = Backward(ex, p, cfg);
  EXPECT_NEAR(g.loss, LossOf(ex, p, cfg), 1e-9 * std::abs(g.loss));
  const double eps = 1e-5;
  PlannerParams q = p;
  auto qt = q.Tensors();
  const auto gt = g.grad.Tensors();
  for (std::size_t k = 0; k < qt.size(); ++k) {
    Eigen::MatrixXd& m = *qt[k];
    Eigen::MatrixXd fd(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double orig = m.data()[i];
      m.data()[i] = orig + eps;
      const double up = LossOf(ex, q, cfg);
      m.data()[i] = orig - eps;
      const double down = LossOf(ex, q, cfg);
      m.data()[i] = orig;
      fd.data()[i] = (up - down) / (2 * eps);
    }
    if (m.size() == 0) continue;
    const double denom = std::max({fd.norm(), gt[k]->norm(), 1e-8});
    EXPECT_LT((fd - *gt[k]).norm() / denom, 1e-4)
        << PlannerParams::kNames[k] << " seed " << seed;
  }
}

TEST(Backward, MatchesFiniteDifferences) {
  for (std::uint64_t seed : {1, 2, 3}) CheckGradient(SmallConfig(), seed);
}

TEST(Backward, MatchesFiniteDifferencesWithoutGridsOrPast) {
  PlannerConfig no_grids = SmallConfig();
  no_grids.use_grids = false;
  CheckGradient(no_grids, 4);
  PlannerConfig no_past = SmallConfig();
  no_past.use_past = false;
  CheckGradient(no_past, 5);
}

TEST(Backward, StationaryMeanAndShrinkingSigma) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(1);
  PlannerExample ex = RandomExample(cfg, rng);
  for (Vec2& f : ex.trajectory.future) f = Vec2::Zero();  // forced means of zero weights
  PlannerParams p = PlannerParams::Zeros(cfg);
  p.b_out(2, 0) = p.b_out(3, 0) = std::log(2.0);  // sigma = 2
  const GradientResult g = Backward(ex, p, cfg);
  EXPECT_EQ(g.grad.b_out(0, 0), 0.0);
  EXPECT_EQ(g.grad.b_out(1, 0), 0.0);
  EXPECT_GT(g.grad.b_out(2, 0), 0.0);
  EXPECT_GT(g.grad.b_out(3, 0), 0.0);
}

TEST(BatchGradient, PermutationInvariantAndSumOfSingles) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(8);
  const PlannerParams p = PlannerParams::Random(cfg, rng);
  std::vector<PlannerExample> data;
  for (int i = 0; i < 6; ++i) data.push_back(RandomExample(cfg, rng));
  const GradientResult a = BatchGradient(data, {0, 1, 2, 3, 4, 5}, p, cfg);
  const GradientResult b = BatchGradient(data, {4, 2, 5, 0, 3, 1}, p, cfg);
  EXPECT_EQ(a.loss, b.loss);
  const auto ta = a.grad.Tensors();
  const auto tb = b.grad.Tensors();
  for (std::size_t k = 0; k < ta.size(); ++k) EXPECT_EQ(*ta[k], *tb[k]);
  PlannerParams sum = PlannerParams::Zeros(cfg);
  for (const PlannerExample& ex : data) sum += Backward(ex, p, cfg).grad;
  const auto ts = sum.Tensors();
  for (std::size_t k = 0; k < ta.size(); ++k) {
    EXPECT_LT((*ts[k] - *ta[k]).norm(), 1e-10 * (1 + ta[k]->norm()));
  }
}

// ---- training ---------------------------------------------------------------

TEST(Train, ZeroLearningRateKeepsParams) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(1);
  std::vector<PlannerExample> data;
  for (int i = 0; i < 12; ++i) data.push_back(RandomExample(cfg, rng));
  TrainHyper h;
  h.learning_rate = 0.0;
  h.epochs = 3;
  Rng init_rng(5);
  const PlannerParams init = PlannerParams::Random(cfg, init_rng);
  const TrainResult r = Train(data, cfg, h, 9, {}, &init);
  const auto a = r.params.Tensors();
  const auto b = init.Tensors();
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(*a[k], *b[k]);
  EXPECT_EQ(r.epoch_loss.size(), 3u);
}

TEST(Train, OverfitsOneSample) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(2);
  const std::vector<PlannerExample> data = {RandomExample(cfg, rng)};
  TrainHyper h;
  h.epochs = 10;
  h.batch_size = 1;
  h.clip_norm = 10.0;
  const TrainResult r = Train(data, cfg, h, 3);
  for (std::size_t e = 1; e < r.epoch_loss.size(); ++e) {
    EXPECT_LT(r.epoch_loss[e], r.epoch_loss[e - 1]) << "epoch " << e;
  }
}

TEST(Train, DeterministicGivenSeed) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(3);
  std::vector<PlannerExample> data;
  for (int i = 0; i < 25; ++i) data.push_back(RandomExample(cfg, rng));
  TrainHyper h;
  h.epochs = 4;
  h.batch_size = 4;
  h.clip_norm = 10.0;
  const TrainResult a = Train(data, cfg, h, 11);
  const TrainResult b = Train(data, cfg, h, 11);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  const auto ta = a.params.Tensors();
  const auto tb = b.params.Tensors();
  for (std::size_t k = 0; k < ta.size(); ++k) EXPECT_EQ(*ta[k], *tb[k]);
}

TEST(Train, DivergenceIsReported) {
  const PlannerConfig cfg = SmallConfig();
  Rng rng(3);
  std::vector<PlannerExample> data;
  for (int i = 0; i < 10; ++i) data.push_back(RandomExample(cfg, rng));
  TrainHyper h;
  h.learning_rate = 1e6;
  h.epochs = 50;
  try {
    Train(data, cfg, h, 1);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumericFailure);
  }
  EXPECT_THROW(Train({}, cfg, TrainHyper{}, 1), Error);
}

// ---- sampling ---------------------------------------------------------------

TEST(SamplePosition, TinySigmaReturnsMean) {
  Rng rng(1);
  const GaussianParams g{3.0, -2.0, 1e-9, 1e-9, 0.3};
  const Vec2 x = SamplePosition(g, rng);
  EXPECT_NEAR(x.x(), 3.0, 1e-7);
  EXPECT_NEAR(x.y(), -2.0, 1e-7);
}

TEST(SamplePosition, CorrelationMatchesRho) {
  Rng rng(2);
  const GaussianParams g{1.0, 2.0, 2.0, 0.5, 0.6};
  const int n = 100000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2 x = SamplePosition(g, rng);
    sx += x.x();
    sy += x.y();
    sxx += x.x() * x.x();
    syy += x.y() * x.y();
    sxy += x.x() * x.y();
  }
  const double mx = sx / n, my = sy / n;
  const double cov = sxy / n - mx * my;
  const double corr = cov / std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
  EXPECT_NEAR(corr, 0.6, 0.02);
  EXPECT_NEAR(mx, 1.0, 0.05);
  EXPECT_NEAR(my, 2.0, 0.05);
}

TEST(SamplePosition, ReproducibleAndValidated) {
  const GaussianParams g{0, 0, 1, 1, -0.2};
  Rng a(5), b(5);
  EXPECT_EQ(SamplePosition(g, a), SamplePosition(g, b));
  Rng c(5);
  EXPECT_THROW(SamplePosition(GaussianParams{0, 0, 1, 1, 1.5}, c), Error);
}

}  // namespace
}  // namespace bevplan
