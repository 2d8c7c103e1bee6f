#include "uwe/colorizer.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <numeric>

#include "uwe/fileio.hpp"

namespace uwe {

namespace {

constexpr char kCheckpointMagic[8] = {'U', 'W', 'C', 'O', 'L', 'O', 'R', '1'};
constexpr int kKernel = 3;

// Stream tag so the shuffle order is independent of the weight stream.
constexpr std::uint64_t kShuffleStream = 0x5348554646ull;  // "SHUFF"

}  // namespace

ColorizerModel build_model(std::uint64_t seed) {
  Prng rng(seed);
  ColorizerModel model;
  for (int i = 0; i < kColorizerConvCount; ++i) {
    model.convs[i] = he_init(kColorizerPlan[i].out_ch, kColorizerPlan[i].in_ch,
                             kKernel, kKernel, rng);
  }
  return model;
}

std::size_t parameter_count(const ColorizerModel& model) {
  std::size_t n = 0;
  for (const ConvParams& c : model.convs) {
    n += c.weights.size() + c.bias.size();
  }
  return n;
}

ForwardTrace forward_trace(const ColorizerModel& model, const Tensor& plane) {
  if (plane.shape.size() != 3 || plane.shape[0] != 1 ||
      plane.shape[1] % 4 != 0 || plane.shape[2] % 4 != 0 ||
      plane.shape[1] == 0 || plane.shape[2] == 0) {
    fail(ErrorCode::MisalignedDims,
         "colorizer: input must be [1,H,W] with H, W divisible by 4");
  }
  ForwardTrace t;
  t.conv_inputs[0] = plane;
  t.pre_activations[0] = conv2d(t.conv_inputs[0], model.convs[0]);
  t.conv_inputs[1] = avgpool2(relu(t.pre_activations[0]));
  t.pre_activations[1] = conv2d(t.conv_inputs[1], model.convs[1]);
  t.conv_inputs[2] = avgpool2(relu(t.pre_activations[1]));
  t.pre_activations[2] = conv2d(t.conv_inputs[2], model.convs[2]);
  t.conv_inputs[3] = upsample2(relu(t.pre_activations[2]));
  t.pre_activations[3] = conv2d(t.conv_inputs[3], model.convs[3]);
  t.conv_inputs[4] = upsample2(relu(t.pre_activations[3]));
  t.pre_activations[4] = conv2d(t.conv_inputs[4], model.convs[4]);
  t.conv_inputs[5] = relu(t.pre_activations[4]);
  t.pre_activations[5] = conv2d(t.conv_inputs[5], model.convs[5]);
  t.output = sigmoid(t.pre_activations[5]);
  return t;
}

Tensor forward(const ColorizerModel& model, const Tensor& plane) {
  return forward_trace(model, plane).output;
}

Tensor backward_trace(const ColorizerModel& model, const ForwardTrace& trace,
                      const Tensor& grad_output, ModelGrads& grads) {
  auto accumulate = [&grads](int i, ConvBackward& back) {
    if (grads.weights[i].size() == 0) {
      grads.weights[i] = back.grad_weights;
      grads.biases[i] = back.grad_bias;
    } else {
      for (std::size_t j = 0; j < back.grad_weights.data.size(); ++j) {
        grads.weights[i].data[j] += back.grad_weights.data[j];
      }
      for (std::size_t j = 0; j < back.grad_bias.data.size(); ++j) {
        grads.biases[i].data[j] += back.grad_bias.data[j];
      }
    }
  };

  Tensor g = sigmoid_backward(grad_output, trace.output);
  ConvBackward b5 = conv2d_backward(g, trace.conv_inputs[5], model.convs[5]);
  accumulate(5, b5);

  g = relu_backward(b5.grad_input, trace.pre_activations[4]);
  ConvBackward b4 = conv2d_backward(g, trace.conv_inputs[4], model.convs[4]);
  accumulate(4, b4);

  g = relu_backward(upsample2_backward(b4.grad_input),
                    trace.pre_activations[3]);
  ConvBackward b3 = conv2d_backward(g, trace.conv_inputs[3], model.convs[3]);
  accumulate(3, b3);

  g = relu_backward(upsample2_backward(b3.grad_input),
                    trace.pre_activations[2]);
  ConvBackward b2 = conv2d_backward(g, trace.conv_inputs[2], model.convs[2]);
  accumulate(2, b2);

  g = relu_backward(avgpool2_backward(b2.grad_input),
                    trace.pre_activations[1]);
  ConvBackward b1 = conv2d_backward(g, trace.conv_inputs[1], model.convs[1]);
  accumulate(1, b1);

  g = relu_backward(avgpool2_backward(b1.grad_input),
                    trace.pre_activations[0]);
  ConvBackward b0 = conv2d_backward(g, trace.conv_inputs[0], model.convs[0]);
  accumulate(0, b0);

  return b0.grad_input;
}

TrainResult train(const std::vector<TrainPair>& pairs, const TrainConfig& cfg,
                  const StepCallback& on_step) {
  if (pairs.empty()) {
    fail(ErrorCode::EmptyDataset, "train: no training pairs");
  }
  if (cfg.patch_size <= 0 || cfg.patch_size % 4 != 0) {
    fail(ErrorCode::MisalignedDims,
         "train: patch_size must be a positive multiple of 4");
  }
  if (cfg.epochs <= 0 || cfg.batch_size <= 0) {
    fail(ErrorCode::ShapeMismatch,
         "train: epochs and batch_size must be positive");
  }
  const int s = cfg.patch_size;
  for (const TrainPair& p : pairs) {
    if (p.input.shape != std::vector<int>{1, s, s} ||
        p.target.shape != std::vector<int>{3, s, s}) {
      fail(ErrorCode::ShapeMismatch,
           "train: patches must be [1,S,S] / [3,S,S] with S = patch_size");
    }
  }

  TrainResult result;
  result.model = build_model(cfg.seed);
  std::array<AdamState, kColorizerConvCount> weight_states;
  std::array<AdamState, kColorizerConvCount> bias_states;
  for (int i = 0; i < kColorizerConvCount; ++i) {
    weight_states[i] = AdamState::for_param(result.model.convs[i].weights);
    bias_states[i] = AdamState::for_param(result.model.convs[i].bias);
  }
  AdamConfig adam;
  adam.lr = cfg.lr;

  Prng shuffle_rng(cfg.seed ^ kShuffleStream);
  std::vector<std::size_t> order(pairs.size());
  std::int64_t step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = shuffle_rng.uniform_index(i);
      std::swap(order[i - 1], order[j]);
    }

    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t n =
          std::min<std::size_t>(cfg.batch_size, order.size() - start);
      ModelGrads grads;
      double loss_sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const TrainPair& sample = pairs[order[start + k]];
        ForwardTrace trace = forward_trace(result.model, sample.input);
        LossResult loss = mse_loss(trace.output, sample.target);
        loss_sum += loss.loss;
        backward_trace(result.model, trace, loss.grad, grads);
      }
      ++step;
      const double batch_loss = loss_sum / static_cast<double>(n);
      if (!std::isfinite(batch_loss)) {
        fail(ErrorCode::NonFiniteLoss,
             "train: loss diverged at step " + std::to_string(step));
      }
      const double inv_n = 1.0 / static_cast<double>(n);
      for (int i = 0; i < kColorizerConvCount; ++i) {
        for (double& g : grads.weights[i].data) g *= inv_n;
        for (double& g : grads.biases[i].data) g *= inv_n;
        adam_step(result.model.convs[i].weights, grads.weights[i],
                  weight_states[i], adam);
        adam_step(result.model.convs[i].bias, grads.biases[i], bias_states[i],
                  adam);
      }
      result.history.per_step.push_back({step, batch_loss});
      if (on_step) on_step(step, batch_loss);
    }
  }
  return result;
}

Tensor gray_plane(const GrayImage& img) {
  Tensor t({1, img.height, img.width});
  t.data = normalize(img);
  return t;
}

Tensor rgb_planes(const RgbImage& img) {
  Tensor t({3, img.height, img.width});
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      t.data[static_cast<std::size_t>(c) * n + i] =
          static_cast<double>(img.pixels[3 * i + c]) / 255.0;
    }
  }
  return t;
}

RgbImage colorize(const ColorizerModel& model, const GrayImage& img) {
  const PaddedImage padded = pad_reflect(img, 4);
  const Tensor out = forward(model, gray_plane(padded.image));
  const RgbImage rgb =
      denormalize(out.data, padded.image.width, padded.image.height);
  return crop(rgb, img.width, img.height);
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
}

class CheckpointReader {
 public:
  explicit CheckpointReader(std::span<const std::uint8_t> bytes)
      : bytes_(bytes) {}

  std::uint32_t read_u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  double read_f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      fail(ErrorCode::TruncatedCheckpoint, "checkpoint: unexpected end of data");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> save_model(const ColorizerModel& model) {
  std::vector<std::uint8_t> out;
  std::size_t payload = sizeof(kCheckpointMagic) + 4;
  for (const ConvParams& c : model.convs) {
    payload += 16 + 8 * (c.weights.size() + c.bias.size());
  }
  out.reserve(payload);
  for (char c : kCheckpointMagic) {
    out.push_back(static_cast<std::uint8_t>(c));
  }
  put_u32(out, kColorizerConvCount);
  for (const ConvParams& c : model.convs) {
    put_u32(out, static_cast<std::uint32_t>(c.out_channels()));
    put_u32(out, static_cast<std::uint32_t>(c.in_channels()));
    put_u32(out, static_cast<std::uint32_t>(c.kernel_h()));
    put_u32(out, static_cast<std::uint32_t>(c.kernel_w()));
    for (double w : c.weights.data) put_f64(out, w);
    for (double b : c.bias.data) put_f64(out, b);
  }
  return out;
}

ColorizerModel load_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kCheckpointMagic)) {
    fail(ErrorCode::TruncatedCheckpoint, "checkpoint: shorter than magic");
  }
  if (!std::equal(std::begin(kCheckpointMagic), std::end(kCheckpointMagic),
                  bytes.begin())) {
    fail(ErrorCode::BadMagic, "checkpoint: bad magic");
  }
  CheckpointReader reader(bytes.subspan(sizeof(kCheckpointMagic)));
  if (reader.read_u32() != kColorizerConvCount) {
    fail(ErrorCode::ArchMismatch, "checkpoint: conv layer count differs");
  }
  ColorizerModel model;
  for (int i = 0; i < kColorizerConvCount; ++i) {
    const std::uint32_t out_ch = reader.read_u32();
    const std::uint32_t in_ch = reader.read_u32();
    const std::uint32_t kh = reader.read_u32();
    const std::uint32_t kw = reader.read_u32();
    if (out_ch != static_cast<std::uint32_t>(kColorizerPlan[i].out_ch) ||
        in_ch != static_cast<std::uint32_t>(kColorizerPlan[i].in_ch) ||
        kh != kKernel || kw != kKernel) {
      fail(ErrorCode::ArchMismatch,
           "checkpoint: layer " + std::to_string(i) +
               " does not match the fixed architecture");
    }
    ConvParams& c = model.convs[i];
    c.weights = Tensor::zeros({static_cast<int>(out_ch),
                               static_cast<int>(in_ch), static_cast<int>(kh),
                               static_cast<int>(kw)});
    c.bias = Tensor::zeros({static_cast<int>(out_ch)});
    for (double& w : c.weights.data) w = reader.read_f64();
    for (double& b : c.bias.data) b = reader.read_f64();
  }
  return model;
}

ColorizerModel load_model_file(const std::string& path) {
  return load_model(read_file(path));
}

void save_model_file(const std::string& path, const ColorizerModel& model) {
  write_file_atomic(path, save_model(model));
}

}  // namespace uwe
