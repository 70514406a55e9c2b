// Copyright 2026 The FutureFoul Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "futurefoul/error.hpp"
#include "futurefoul/model.hpp"
#include "futurefoul/nn/layers.hpp"
#include "test_support.hpp"

namespace futurefoul {
namespace {

// Independent closed forms used to pin the parameter budget.
std::size_t gru(std::size_t in, std::size_t h, int layers) {
  std::size_t total = 0;
  for (int l = 0; l < layers; ++l) {
    total += 3 * h * ((l == 0 ? in : h) + h) + 6 * h;
  }
  return total;
}

std::size_t cnn(std::size_t c1, std::size_t c2, std::size_t c3) {
  return 9 * (3 * c1 + c1 * c2 + c2 * c3) + 2 * (c1 + c2 + c3);
}

std::size_t group_size(FutureFoulNet<float>& net, const std::string& name) {
  std::size_t n = 0;
  for (auto* p : net.group(name).params) n += p->value.size();
  return n;
}

TEST(ParameterCount, DefaultBudgetPerGroup) {
  FeatureConfig f;
  f.crop_size = 64;
  FutureFoulNet<float> net(ModelConfig::full(), f, 1);
  // 224 and 64 both pool to a 4x4 grid of 64 channels.
  EXPECT_EQ(cnn(16, 32, 64), 23696u);
  EXPECT_EQ(group_size(net, "video"), 23696u + 1379328u);
  EXPECT_EQ(group_size(net, "bbox"), 600576u);
  EXPECT_EQ(group_size(net, "pose"), 723456u);
  EXPECT_EQ(group_size(net, "bboximg"), 23696u + 4525056u);
  EXPECT_EQ(group_size(net, "mlp"), 590722u);
  EXPECT_EQ(gru(1024, 256, 2), 1379328u);
  EXPECT_EQ(gru(10, 256, 2), 600576u);
  EXPECT_EQ(gru(170, 256, 2), 723456u);
  EXPECT_EQ(gru(5 * 1024, 256, 2), 4525056u);
  EXPECT_EQ(net.parameter_count(), parameter_count(ModelConfig::full(), f));
}

TEST(ParameterCount, ClosedFormMatchesInstantiatedModels) {
  const FeatureConfig f = testing::tiny_features(4, 32, 16);
  for (const ModelConfig& base : {ModelConfig::full(), ModelConfig::video_bbox_pose(), ModelConfig::video_bbox(),
                                  ModelConfig::video_gru(), ModelConfig::cnn_video()}) {
    const ModelConfig m = testing::tiny_model(base);
    FutureFoulNet<float> net(m, f, 2);
    std::size_t total = 0;
    for (auto* p : net.parameters().params) total += p->value.size();
    EXPECT_EQ(total, parameter_count(m, f));
    EXPECT_EQ(net.parameter_count(), total);
  }
  // Hand count for the tiny full model: 32 -> 16,8,4 and 16 -> 8,4,2.
  const std::size_t expect = 2 * cnn(3, 4, 4) + gru(64, 6, 2) + gru(10, 6, 2) + gru(170, 6, 2) + gru(5 * 16, 6, 2) +
                             (24 * 8 + 8) + (8 * 6 + 6) + (6 * 2 + 2);
  EXPECT_EQ(parameter_count(testing::tiny_model(), f), expect);
}

TEST(ModelConfigTest, CnnOnlyRequiresVideoAlone) {
  ModelConfig m = ModelConfig::cnn_video();
  EXPECT_NO_THROW(m.validate());
  m.use_bbox = true;
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(Shapes, LogitsAndFusedWidth) {
  const FeatureConfig f = testing::tiny_features(4, 16, 16);
  const auto samples = testing::synth_samples(3, 4, f);
  const auto ptrs = testing::pointers(samples);
  const ModelConfig m = testing::tiny_model();
  FutureFoulNet<double> net(m, f, 3);
  const auto batch = make_batch<double>(ptrs, m);
  EXPECT_EQ(batch.video.shape, (std::vector<int>{3, 4, 3, 16, 16}));
  EXPECT_EQ(batch.crops.shape, (std::vector<int>{3, 4, 5, 3, 16, 16}));
  const auto logits = net.forward(batch, Mode::Eval);
  EXPECT_EQ(logits.shape, (std::vector<int>{3, 2}));
  EXPECT_EQ(net.fused_dim(), 24);
  FutureFoulNet<double> cnn_only(testing::tiny_model(ModelConfig::cnn_video()), f, 3);
  // Without the recurrent module the frame features are averaged.
  EXPECT_EQ(cnn_only.fused_dim(), 2 * 2 * 4);
}

TEST(Shapes, TinyInputsAreRejected) {
  Rng rng(1);
  CnnEncoder<double> enc("e", {3, 4, 4}, 0.0, rng);
  EXPECT_THROW(enc.forward(nn::Tensor<double>({1, 3, 7, 16}), Mode::Eval, rng), ShapeError);
  EXPECT_NO_THROW(enc.forward(nn::Tensor<double>({1, 3, 8, 8}), Mode::Eval, rng));
}

TEST(Shapes, MixedFeatureConfigsCannotBatch) {
  auto a = testing::synth_samples(2, 5, testing::tiny_features(4, 16, 16));
  const auto b = testing::synth_samples(2, 5, testing::tiny_features(4, 32, 16));
  a.push_back(b[0]);
  EXPECT_THROW(make_batch<double>(testing::pointers(a), testing::tiny_model()), ShapeError);
}

TEST(Probability, SoftmaxOfFoulColumn) {
  nn::Tensor<double> logits({2, 2});
  logits.data = {0.0, 0.0, 0.0, std::log(3.0)};
  const auto p = foul_probability(logits);
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[1], 0.75, 1e-12);
}

TEST(Branches, DisabledInputsDoNotAffectOutput) {
  const FeatureConfig f = testing::tiny_features(4, 16, 16);
  auto samples = testing::synth_samples(2, 6, f);
  const ModelConfig m = testing::tiny_model(ModelConfig::video_bbox());
  FutureFoulNet<float> net(m, f, 7);
  const auto before = net.forward(make_batch<float>(testing::pointers(samples), m), Mode::Eval);
  for (auto& s : samples) {
    for (auto& v : s.poses) v = 0.123;
    for (auto& v : s.crops) v = 200;
  }
  const auto after = net.forward(make_batch<float>(testing::pointers(samples), m), Mode::Eval);
  EXPECT_EQ(before.data, after.data);
  for (auto& s : samples) {
    for (auto& v : s.feet) v = 0.9;
  }
  const auto moved = net.forward(make_batch<float>(testing::pointers(samples), m), Mode::Eval);
  EXPECT_NE(before.data, moved.data);
}

TEST(Branches, SameSeedSameWeights) {
  const FeatureConfig f = testing::tiny_features();
  FutureFoulNet<float> a(testing::tiny_model(), f, 9);
  FutureFoulNet<float> b(testing::tiny_model(), f, 9);
  FutureFoulNet<float> c(testing::tiny_model(), f, 10);
  const auto pa = a.parameters().params;
  const auto pb = b.parameters().params;
  const auto pc = c.parameters().params;
  bool differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i]->value.data, pb[i]->value.data);
    differs = differs || pa[i]->value.data != pc[i]->value.data;
  }
  EXPECT_TRUE(differs);
}

TEST(Branches, ActivationPatternTracksKinks) {
  const FeatureConfig f = testing::tiny_features(4, 16, 16);
  const auto samples = testing::synth_samples(2, 8, f);
  const ModelConfig m = testing::tiny_model();
  FutureFoulNet<double> net(m, f, 3);
  const auto batch = make_batch<double>(testing::pointers(samples), m);
  net.set_dropout_seed(1);
  net.forward(batch, Mode::Train);
  const auto first = net.activation_pattern();
  net.set_dropout_seed(1);
  net.forward(batch, Mode::Train);
  EXPECT_EQ(net.activation_pattern(), first);
  // Shifting every first-layer BN bias far negative silences that layer.
  for (auto* p : net.group("video").params) {
    if (p->name == "video.cnn.bn1.bias") {
      for (auto& v : p->value.data) v = -100.0;
    }
  }
  net.set_dropout_seed(1);
  net.forward(batch, Mode::Train);
  EXPECT_NE(net.activation_pattern(), first);
}

double loss_at(FutureFoulNet<double>& net, const Batch<double>& batch) {
  net.set_dropout_seed(77);
  return nn::cross_entropy<double>(net.forward(batch, Mode::Train), batch.labels, nullptr);
}

void check_model_gradients(const ModelConfig& m) {
  const FeatureConfig f = testing::tiny_features(4, 16, 16);
  const auto samples = testing::synth_samples(3, 12, f);
  const auto batch = make_batch<double>(testing::pointers(samples), m);
  FutureFoulNet<double> net(m, f, 13);
  auto params = net.parameters();
  for (auto* p : params.params) p->zero_grad();
  net.set_dropout_seed(77);
  nn::Tensor<double> grad;
  nn::cross_entropy(net.forward(batch, Mode::Train), batch.labels, &grad);
  net.backward(grad);
  const double h = 1e-6;
  int checked = 0;
  for (auto* p : params.params) {
    const std::size_t stride = std::max<std::size_t>(1, p->value.size() / 5);
    for (std::size_t i = 0; i < p->value.size(); i += stride) {
      const double keep = p->value.data[i];
      p->value.data[i] = keep + h;
      const double up = loss_at(net, batch);
      p->value.data[i] = keep - h;
      const double down = loss_at(net, batch);
      p->value.data[i] = keep;
      const double numeric = (up - down) / (2 * h);
      EXPECT_LT(testing::relative_error(p->grad.data[i], numeric, 1e-6), 1e-4)
          << p->name << "[" << i << "] analytic " << p->grad.data[i] << " numeric " << numeric;
      ++checked;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Gradients, FullModelWithDropout) {
  check_model_gradients(testing::tiny_model());
}

TEST(Gradients, CnnOnlyModel) {
  ModelConfig m = testing::tiny_model(ModelConfig::cnn_video());
  m.dropout_p = 0.0;
  check_model_gradients(m);
}

}  // namespace
}  // namespace futurefoul
