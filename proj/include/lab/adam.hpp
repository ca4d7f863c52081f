#pragma once

// Standard bias-corrected Adam over a ParamStore's flat entry order.

#include <vector>

#include "lab/params.hpp"

namespace lab::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// grads must align with store.entries (same order, same shapes).  Throws
// NumericalError naming the parameter and step on any non-finite gradient.
void adam_step(ParamStore& store, const std::vector<Tensor>& grads, const AdamConfig& cfg);

}  // namespace lab::ad
