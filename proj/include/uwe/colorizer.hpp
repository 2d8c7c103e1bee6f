#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "uwe/image.hpp"
#include "uwe/nn.hpp"

namespace uwe {

/// The fixed topology, encoder compressing the gray plane to a 64-channel
/// code at quarter resolution and decoder emitting 3 color channels:
///
///   conv(1->16)  relu  avgpool2
///   conv(16->32) relu  avgpool2
///   conv(32->64) relu  upsample2
///   conv(64->32) relu  upsample2
///   conv(32->16) relu
///   conv(16->3)  sigmoid
///
/// All convolutions are 3x3 with padding 1. The layer list is not
/// configurable; the checkpoint magic versions it.
inline constexpr int kColorizerConvCount = 6;

struct ConvShape {
  int out_ch;
  int in_ch;
};

inline constexpr std::array<ConvShape, kColorizerConvCount> kColorizerPlan{{
    {16, 1},
    {32, 16},
    {64, 32},
    {32, 64},
    {16, 32},
    {3, 16},
}};

struct ColorizerModel {
  std::array<ConvParams, kColorizerConvCount> convs;
};

/// All convolutions initialized by he_init from one Prng, in layer order;
/// biases zero. The same seed reproduces the model bit for bit.
ColorizerModel build_model(std::uint64_t seed);

std::size_t parameter_count(const ColorizerModel& model);

/// plane [1,H,W] with H, W divisible by 4 -> [3,H,W] in (0,1).
/// Throws MisalignedDims otherwise.
Tensor forward(const ColorizerModel& model, const Tensor& plane);

/// Forward pass that keeps every intermediate needed for backprop.
struct ForwardTrace {
  std::array<Tensor, kColorizerConvCount> conv_inputs;
  std::array<Tensor, kColorizerConvCount> pre_activations;
  Tensor output;
};

ForwardTrace forward_trace(const ColorizerModel& model, const Tensor& plane);

struct ModelGrads {
  std::array<Tensor, kColorizerConvCount> weights;
  std::array<Tensor, kColorizerConvCount> biases;
};

/// Backpropagates d loss / d output through the trace; returns the gradient
/// with respect to the input plane and accumulates parameter gradients
/// (grads += contribution, so per-sample gradients can be summed in order).
Tensor backward_trace(const ColorizerModel& model, const ForwardTrace& trace,
                      const Tensor& grad_output, ModelGrads& grads);

struct TrainConfig {
  int epochs = 10;
  double lr = 1e-3;
  std::uint64_t seed = 42;
  int patch_size = 32;  // must be divisible by 4
  int patches_per_image = 16;
  int batch_size = 8;
};

struct TrainPair {
  Tensor input;   // [1,S,S], values in [0,1]
  Tensor target;  // [3,S,S], values in [0,1]
};

struct LossHistory {
  struct Entry {
    std::int64_t step;
    double loss;  // mean batch loss
  };
  std::vector<Entry> per_step;
};

struct TrainResult {
  ColorizerModel model;
  LossHistory history;
};

using StepCallback = std::function<void(std::int64_t step, double loss)>;

/// Seeded mini-batch Adam training. Per batch, per-sample gradients are
/// summed in iteration order and divided by the batch size before one
/// optimizer step per parameter tensor, so results are bit-reproducible.
/// Throws EmptyDataset, ShapeMismatch, and NonFiniteLoss (with the step
/// index) if the loss diverges.
TrainResult train(const std::vector<TrainPair>& pairs, const TrainConfig& cfg,
                  const StepCallback& on_step = {});

/// pad_reflect to a multiple of 4 -> normalize -> forward -> denormalize ->
/// crop back to the original dimensions.
RgbImage colorize(const ColorizerModel& model, const GrayImage& img);

/// Tensor views of images as the network consumes them.
Tensor gray_plane(const GrayImage& img);
Tensor rgb_planes(const RgbImage& img);

/// Checkpoint layout (little-endian): magic "UWCOLOR1", u32 conv count,
/// then per conv u32 out/in/kh/kw, f64 weights row-major, f64 biases.
std::vector<std::uint8_t> save_model(const ColorizerModel& model);
ColorizerModel load_model(std::span<const std::uint8_t> bytes);

ColorizerModel load_model_file(const std::string& path);
void save_model_file(const std::string& path, const ColorizerModel& model);

}  // namespace uwe
