#include "lab/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lab/errors.hpp"

namespace lab::ad {

void adam_step(ParamStore& store, const std::vector<Tensor>& grads, const AdamConfig& cfg) {
  if (grads.size() != store.entries.size())
    throw std::logic_error("adam_step: gradient list does not match parameter store");

  const long t = store.adam_t + 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));

  for (std::size_t i = 0; i < store.entries.size(); ++i) {
    ParamEntry& e = store.entries[i];
    const Tensor& g = grads[i];
    if (!g.same_shape(e.value))
      throw std::logic_error("adam_step: gradient shape mismatch for " + e.name);
    if (!all_finite(g))
      throw NumericalError("adam_step: non-finite gradient for " + e.name + " at step " +
                           std::to_string(t));
    for (int k = 0; k < g.size(); ++k) {
      const double gk = g.data[k];
      e.m.data[k] = cfg.beta1 * e.m.data[k] + (1.0 - cfg.beta1) * gk;
      e.v.data[k] = cfg.beta2 * e.v.data[k] + (1.0 - cfg.beta2) * gk * gk;
      const double mhat = e.m.data[k] / bc1;
      const double vhat = e.v.data[k] / bc2;
      e.value.data[k] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
  store.adam_t = t;
}

}  // namespace lab::ad
