// Finite-difference harness for the full colorizer: perturbs one scalar at a
// time and re-runs the whole forward pass, so it is independent of the
// analytic backward path it validates.
#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "uwe/colorizer.hpp"

namespace testutil {

inline std::vector<uwe::Tensor*> parameter_tensors(uwe::ColorizerModel& m) {
  std::vector<uwe::Tensor*> out;
  for (uwe::ConvParams& c : m.convs) {
    out.push_back(&c.weights);
    out.push_back(&c.bias);
  }
  return out;
}

inline double model_loss(const uwe::ColorizerModel& m, const uwe::Tensor& input,
                         const uwe::Tensor& target) {
  return uwe::mse_loss(uwe::forward(m, input), target).loss;
}

struct ModelGradients {
  uwe::ModelGrads params;
  uwe::Tensor input;
};

inline ModelGradients analytic_gradients(const uwe::ColorizerModel& m,
                                         const uwe::Tensor& input,
                                         const uwe::Tensor& target) {
  ModelGradients g;
  const uwe::ForwardTrace trace = uwe::forward_trace(m, input);
  const uwe::LossResult loss = uwe::mse_loss(trace.output, target);
  g.input = uwe::backward_trace(m, trace, loss.grad, g.params);
  return g;
}

// Flat view of the analytic parameter gradients in the same order as
// parameter_tensors.
inline std::vector<const uwe::Tensor*> gradient_tensors(
    const uwe::ModelGrads& grads) {
  std::vector<const uwe::Tensor*> out;
  for (int i = 0; i < uwe::kColorizerConvCount; ++i) {
    out.push_back(&grads.weights[i]);
    out.push_back(&grads.biases[i]);
  }
  return out;
}

inline double fd_parameter_gradient(uwe::ColorizerModel& m, std::size_t tensor,
                                    std::size_t index, const uwe::Tensor& input,
                                    const uwe::Tensor& target, double h) {
  std::vector<uwe::Tensor*> params = parameter_tensors(m);
  const double saved = params[tensor]->data[index];
  params[tensor]->data[index] = saved + h;
  const double plus = model_loss(m, input, target);
  params[tensor]->data[index] = saved - h;
  const double minus = model_loss(m, input, target);
  params[tensor]->data[index] = saved;
  return (plus - minus) / (2.0 * h);
}

inline double fd_input_gradient(const uwe::ColorizerModel& m,
                                uwe::Tensor input, std::size_t index,
                                const uwe::Tensor& target, double h) {
  const double saved = input.data[index];
  input.data[index] = saved + h;
  const double plus = model_loss(m, input, target);
  input.data[index] = saved - h;
  const double minus = model_loss(m, input, target);
  return (plus - minus) / (2.0 * h);
}

}  // namespace testutil
