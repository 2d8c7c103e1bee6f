#pragma once

#include <cstdint>

#include "uwe/rng.hpp"
#include "uwe/tensor.hpp"

namespace uwe {

/// Weights of one convolution: [out_ch, in_ch, kh, kw] plus per-output bias.
struct ConvParams {
  Tensor weights;
  Tensor bias;

  int out_channels() const { return weights.shape[0]; }
  int in_channels() const { return weights.shape[1]; }
  int kernel_h() const { return weights.shape[2]; }
  int kernel_w() const { return weights.shape[3]; }
};

/// Same-size 2-D convolution, stride 1, zero padding (kernel-1)/2.
/// input [C_in,H,W] -> [C_out,H,W]. Throws ShapeMismatch.
Tensor conv2d(const Tensor& input, const ConvParams& params);

struct ConvBackward {
  Tensor grad_input;
  Tensor grad_weights;
  Tensor grad_bias;
};

/// Exact analytic gradients of conv2d. Summation orders are fixed, so
/// results are bit-identical across runs.
ConvBackward conv2d_backward(const Tensor& grad_out, const Tensor& input,
                             const ConvParams& params);

/// max(0, x); the derivative at exactly 0 is defined as 0.
Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& grad_out, const Tensor& x);

/// 1 / (1 + e^-x), overflow-safe. Backward takes the forward output y.
Tensor sigmoid(const Tensor& x);
Tensor sigmoid_backward(const Tensor& grad_out, const Tensor& y);

/// 2x2 mean pooling, [C,H,W] -> [C,H/2,W/2]. Throws OddDimension.
Tensor avgpool2(const Tensor& x);
Tensor avgpool2_backward(const Tensor& grad_out);

/// Nearest-neighbor 2x upsampling, [C,H,W] -> [C,2H,2W].
Tensor upsample2(const Tensor& x);
Tensor upsample2_backward(const Tensor& grad_out);

struct LossResult {
  double loss = 0.0;
  Tensor grad;  // d loss / d pred
};

/// mean((pred - target)^2); grad = 2 (pred - target) / N.
LossResult mse_loss(const Tensor& pred, const Tensor& target);

struct AdamState {
  Tensor m;
  Tensor v;
  std::int64_t t = 0;

  static AdamState for_param(const Tensor& param) {
    AdamState s;
    s.m = Tensor::zeros(param.shape);
    s.v = Tensor::zeros(param.shape);
    return s;
  }
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update in place.
void adam_step(Tensor& params, const Tensor& grads, AdamState& state,
               const AdamConfig& cfg);

/// Weights uniform in (-b, b) with b = sqrt(6 / (in*kh*kw)), drawn in
/// row-major order; biases zero.
ConvParams he_init(int out_channels, int in_channels, int kh, int kw,
                   Prng& rng);

}  // namespace uwe
