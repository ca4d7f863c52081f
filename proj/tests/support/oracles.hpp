#pragma once

// Independent oracles for the test suites: central finite differences and
// small seeded random-input generators.  Nothing here calls backward(); the
// oracle only ever re-evaluates forward values.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "lab/params.hpp"
#include "lab/tensor.hpp"

namespace oracle {

// Central finite difference of f with respect to data[idx] of `storage`.
// f must re-evaluate from current storage contents on every call.
inline double fd_component(const std::function<double()>& f, double& cell, double h = 1e-5) {
  const double saved = cell;
  cell = saved + h;
  const double fp = f();
  cell = saved - h;
  const double fm = f();
  cell = saved;
  return (fp - fm) / (2.0 * h);
}

// Gradient-check relative error with a unit floor: |a-b| / max(1, |b|).
inline double rel_err(double ad, double fd) {
  return std::abs(ad - fd) / std::max(1.0, std::abs(fd));
}

inline lab::Tensor random_tensor(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  lab::Tensor t(rows, cols);
  for (double& x : t.data) x = u(rng);
  return t;
}

// Check every component of `store` against finite differences of f.
// Returns the worst rel_err encountered.
inline double fd_check_store(lab::ad::ParamStore& store, const std::function<double()>& f,
                             const std::vector<lab::Tensor>& grads, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t e = 0; e < store.entries.size(); ++e) {
    auto& value = store.entries[e].value;
    for (int k = 0; k < value.size(); ++k) {
      const double fd = fd_component(f, value.data[k], h);
      worst = std::max(worst, rel_err(grads[e].data[k], fd));
    }
  }
  return worst;
}

}  // namespace oracle
