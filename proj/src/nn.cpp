#include "uwe/nn.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace uwe {

bool operator==(const Tensor& a, const Tensor& b) {
  return a.shape == b.shape && a.data == b.data;
}

namespace {

void require_3d(const Tensor& t, const char* what) {
  if (t.shape.size() != 3) {
    fail(ErrorCode::ShapeMismatch, std::string(what) + ": expected 3-D tensor");
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::ShapeMismatch, std::string(what) + ": shapes differ");
  }
}

struct ConvDims {
  int cin, h, w, cout, kh, kw, ph, pw;
};

ConvDims conv_dims(const Tensor& input, const ConvParams& params,
                   const char* what) {
  require_3d(input, what);
  if (params.weights.shape.size() != 4 || params.bias.shape.size() != 1 ||
      params.bias.shape[0] != params.weights.shape[0]) {
    fail(ErrorCode::ShapeMismatch, std::string(what) + ": malformed parameters");
  }
  ConvDims d;
  d.cin = input.shape[0];
  d.h = input.shape[1];
  d.w = input.shape[2];
  d.cout = params.out_channels();
  d.kh = params.kernel_h();
  d.kw = params.kernel_w();
  if (params.in_channels() != d.cin) {
    fail(ErrorCode::ShapeMismatch,
         std::string(what) + ": input channel count does not match weights");
  }
  if (d.kh % 2 == 0 || d.kw % 2 == 0) {
    fail(ErrorCode::ShapeMismatch,
         std::string(what) + ": kernel dims must be odd for same-size output");
  }
  d.ph = d.kh / 2;
  d.pw = d.kw / 2;
  return d;
}

}  // namespace

// The hot loops below keep the innermost traversal contiguous over x with a
// single hoisted weight, which the compiler turns into packed FMAs. Each
// output element still accumulates in a fixed (c,dy,dx) order.
Tensor conv2d(const Tensor& input, const ConvParams& params) {
  const ConvDims d = conv_dims(input, params, "conv2d");
  Tensor out({d.cout, d.h, d.w});
  const std::size_t plane = static_cast<std::size_t>(d.h) * d.w;
  const double* in = input.data.data();
  const double* wt = params.weights.data.data();
  for (int oc = 0; oc < d.cout; ++oc) {
    double* out_plane = out.data.data() + oc * plane;
    std::fill_n(out_plane, plane, params.bias.data[oc]);
    for (int ic = 0; ic < d.cin; ++ic) {
      const double* in_plane = in + ic * plane;
      const double* kernel = wt + (static_cast<std::size_t>(oc) * d.cin + ic) *
                                      d.kh * d.kw;
      for (int dy = 0; dy < d.kh; ++dy) {
        const int y0 = std::max(0, d.ph - dy);
        const int y1 = std::min(d.h, d.h + d.ph - dy);
        for (int dx = 0; dx < d.kw; ++dx) {
          const double wv = kernel[dy * d.kw + dx];
          const int x0 = std::max(0, d.pw - dx);
          const int x1 = std::min(d.w, d.w + d.pw - dx);
          for (int y = y0; y < y1; ++y) {
            double* orow = out_plane + static_cast<std::size_t>(y) * d.w;
            const double* irow = in_plane +
                                 static_cast<std::size_t>(y + dy - d.ph) * d.w +
                                 (dx - d.pw);
            for (int x = x0; x < x1; ++x) {
              orow[x] += wv * irow[x];
            }
          }
        }
      }
    }
  }
  return out;
}

ConvBackward conv2d_backward(const Tensor& grad_out, const Tensor& input,
                             const ConvParams& params) {
  const ConvDims d = conv_dims(input, params, "conv2d_backward");
  require_3d(grad_out, "conv2d_backward");
  if (grad_out.shape[0] != d.cout || grad_out.shape[1] != d.h ||
      grad_out.shape[2] != d.w) {
    fail(ErrorCode::ShapeMismatch, "conv2d_backward: grad_out shape mismatch");
  }

  ConvBackward result;
  result.grad_input = Tensor::zeros(input.shape);
  result.grad_weights = Tensor::zeros(params.weights.shape);
  result.grad_bias = Tensor::zeros(params.bias.shape);

  const std::size_t plane = static_cast<std::size_t>(d.h) * d.w;
  const double* in = input.data.data();
  const double* go = grad_out.data.data();
  const double* wt = params.weights.data.data();
  double* gi = result.grad_input.data.data();
  double* gw = result.grad_weights.data.data();

  for (int oc = 0; oc < d.cout; ++oc) {
    const double* go_plane = go + oc * plane;
    double bias_sum = 0.0;
    for (std::size_t i = 0; i < plane; ++i) bias_sum += go_plane[i];
    result.grad_bias.data[oc] = bias_sum;
  }

  // Per-weight sums are gathered into a row accumulator first so the inner
  // loops stay elementwise; the final short reduction is scalar.
  std::vector<double> acc(static_cast<std::size_t>(d.w));
  for (int oc = 0; oc < d.cout; ++oc) {
    const double* go_plane = go + oc * plane;
    for (int ic = 0; ic < d.cin; ++ic) {
      const double* in_plane = in + ic * plane;
      double* gi_plane = gi + ic * plane;
      const double* kernel = wt + (static_cast<std::size_t>(oc) * d.cin + ic) *
                                      d.kh * d.kw;
      double* gkernel = gw + (static_cast<std::size_t>(oc) * d.cin + ic) *
                                 d.kh * d.kw;
      for (int dy = 0; dy < d.kh; ++dy) {
        const int y0 = std::max(0, d.ph - dy);
        const int y1 = std::min(d.h, d.h + d.ph - dy);
        for (int dx = 0; dx < d.kw; ++dx) {
          const double wv = kernel[dy * d.kw + dx];
          const int x0 = std::max(0, d.pw - dx);
          const int x1 = std::min(d.w, d.w + d.pw - dx);
          std::fill(acc.begin() + x0, acc.begin() + x1, 0.0);
          for (int y = y0; y < y1; ++y) {
            const double* gorow = go_plane + static_cast<std::size_t>(y) * d.w;
            const std::size_t shifted =
                static_cast<std::size_t>(y + dy - d.ph) * d.w + (dx - d.pw);
            double* girow = gi_plane + shifted;
            const double* irow = in_plane + shifted;
            for (int x = x0; x < x1; ++x) {
              girow[x] += wv * gorow[x];
              acc[x] += gorow[x] * irow[x];
            }
          }
          double sum = 0.0;
          for (int x = x0; x < x1; ++x) sum += acc[x];
          gkernel[dy * d.kw + dx] = sum;
        }
      }
    }
  }
  return result;
}

Tensor relu(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& grad_out, const Tensor& x) {
  require_same_shape(grad_out, x, "relu_backward");
  Tensor grad = grad_out;
  for (std::size_t i = 0; i < grad.data.size(); ++i) {
    if (!(x.data[i] > 0.0)) grad.data[i] = 0.0;
  }
  return grad;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.data) {
    if (v >= 0.0) {
      v = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double e = std::exp(v);
      v = e / (1.0 + e);
    }
  }
  return out;
}

Tensor sigmoid_backward(const Tensor& grad_out, const Tensor& y) {
  require_same_shape(grad_out, y, "sigmoid_backward");
  Tensor grad = grad_out;
  for (std::size_t i = 0; i < grad.data.size(); ++i) {
    grad.data[i] *= y.data[i] * (1.0 - y.data[i]);
  }
  return grad;
}

Tensor avgpool2(const Tensor& x) {
  require_3d(x, "avgpool2");
  const int c = x.shape[0], h = x.shape[1], w = x.shape[2];
  if (h % 2 != 0 || w % 2 != 0) {
    fail(ErrorCode::OddDimension, "avgpool2: H and W must be even");
  }
  Tensor out({c, h / 2, w / 2});
  const std::size_t in_plane = static_cast<std::size_t>(h) * w;
  const std::size_t out_plane = in_plane / 4;
  for (int ch = 0; ch < c; ++ch) {
    const double* ip = x.data.data() + ch * in_plane;
    double* op = out.data.data() + ch * out_plane;
    for (int y = 0; y < h / 2; ++y) {
      const double* r0 = ip + static_cast<std::size_t>(2 * y) * w;
      const double* r1 = r0 + w;
      double* orow = op + static_cast<std::size_t>(y) * (w / 2);
      for (int xo = 0; xo < w / 2; ++xo) {
        orow[xo] =
            ((r0[2 * xo] + r0[2 * xo + 1]) + (r1[2 * xo] + r1[2 * xo + 1])) *
            0.25;
      }
    }
  }
  return out;
}

Tensor avgpool2_backward(const Tensor& grad_out) {
  require_3d(grad_out, "avgpool2_backward");
  const int c = grad_out.shape[0], h = grad_out.shape[1], w = grad_out.shape[2];
  Tensor grad({c, 2 * h, 2 * w});
  const std::size_t out_plane = static_cast<std::size_t>(h) * w;
  const std::size_t in_plane = out_plane * 4;
  for (int ch = 0; ch < c; ++ch) {
    const double* gp = grad_out.data.data() + ch * out_plane;
    double* ip = grad.data.data() + ch * in_plane;
    for (int y = 0; y < h; ++y) {
      double* r0 = ip + static_cast<std::size_t>(2 * y) * (2 * w);
      double* r1 = r0 + 2 * w;
      const double* grow = gp + static_cast<std::size_t>(y) * w;
      for (int x = 0; x < w; ++x) {
        const double g = grow[x] * 0.25;
        r0[2 * x] = g;
        r0[2 * x + 1] = g;
        r1[2 * x] = g;
        r1[2 * x + 1] = g;
      }
    }
  }
  return grad;
}

Tensor upsample2(const Tensor& x) {
  require_3d(x, "upsample2");
  const int c = x.shape[0], h = x.shape[1], w = x.shape[2];
  Tensor out({c, 2 * h, 2 * w});
  const std::size_t in_plane = static_cast<std::size_t>(h) * w;
  const std::size_t out_plane = in_plane * 4;
  for (int ch = 0; ch < c; ++ch) {
    const double* ip = x.data.data() + ch * in_plane;
    double* op = out.data.data() + ch * out_plane;
    for (int y = 0; y < h; ++y) {
      const double* irow = ip + static_cast<std::size_t>(y) * w;
      double* r0 = op + static_cast<std::size_t>(2 * y) * (2 * w);
      double* r1 = r0 + 2 * w;
      for (int x = 0; x < w; ++x) {
        r0[2 * x] = irow[x];
        r0[2 * x + 1] = irow[x];
        r1[2 * x] = irow[x];
        r1[2 * x + 1] = irow[x];
      }
    }
  }
  return out;
}

Tensor upsample2_backward(const Tensor& grad_out) {
  require_3d(grad_out, "upsample2_backward");
  const int c = grad_out.shape[0], h = grad_out.shape[1], w = grad_out.shape[2];
  if (h % 2 != 0 || w % 2 != 0) {
    fail(ErrorCode::OddDimension, "upsample2_backward: H and W must be even");
  }
  Tensor grad({c, h / 2, w / 2});
  const std::size_t out_plane = static_cast<std::size_t>(h) * w;
  const std::size_t in_plane = out_plane / 4;
  for (int ch = 0; ch < c; ++ch) {
    const double* gp = grad_out.data.data() + ch * out_plane;
    double* ip = grad.data.data() + ch * in_plane;
    for (int y = 0; y < h / 2; ++y) {
      const double* r0 = gp + static_cast<std::size_t>(2 * y) * w;
      const double* r1 = r0 + w;
      double* irow = ip + static_cast<std::size_t>(y) * (w / 2);
      for (int x = 0; x < w / 2; ++x) {
        irow[x] = (r0[2 * x] + r0[2 * x + 1]) + (r1[2 * x] + r1[2 * x + 1]);
      }
    }
  }
  return grad;
}

LossResult mse_loss(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "mse_loss");
  const double n = static_cast<double>(pred.size());
  LossResult result;
  result.grad = Tensor::zeros(pred.shape);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    sum += d * d;
    result.grad.data[i] = 2.0 * d / n;
  }
  result.loss = sum / n;
  return result;
}

void adam_step(Tensor& params, const Tensor& grads, AdamState& state,
               const AdamConfig& cfg) {
  require_same_shape(params, grads, "adam_step");
  require_same_shape(params, state.m, "adam_step");
  require_same_shape(params, state.v, "adam_step");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.data.size(); ++i) {
    const double g = grads.data[i];
    state.m.data[i] = cfg.beta1 * state.m.data[i] + (1.0 - cfg.beta1) * g;
    state.v.data[i] = cfg.beta2 * state.v.data[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m.data[i] / bc1;
    const double v_hat = state.v.data[i] / bc2;
    params.data[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

ConvParams he_init(int out_channels, int in_channels, int kh, int kw,
                   Prng& rng) {
  ConvParams p;
  p.weights = Tensor::zeros({out_channels, in_channels, kh, kw});
  p.bias = Tensor::zeros({out_channels});
  const double bound =
      std::sqrt(6.0 / (static_cast<double>(in_channels) * kh * kw));
  for (double& w : p.weights.data) {
    w = (2.0 * rng.uniform() - 1.0) * bound;
  }
  return p;
}

}  // namespace uwe
