#pragma once

// Multilayer perceptron on the tape: tanh hidden layers, identity or sigmoid
// output, Glorot-uniform initialisation, zero biases.
//
// mlp_input_gradient builds ∂y/∂x for a scalar-output (identity) network as
// ordinary tape operations — the analytic backward pass of the network,
// recorded forward.  Differentiating a loss that consumes this gradient
// therefore reaches the parameters through a exact second-order path, and the
// construction itself touches no adjoints.

#include <cstdint>
#include <string>
#include <vector>

#include "lab/params.hpp"
#include "lab/tape.hpp"

namespace lab::ad {

enum class OutAct { Identity, Sigmoid };

struct MlpSpec {
  int in = 0;
  std::vector<int> hidden;  // widths of the tanh layers
  int out = 0;
  OutAct out_act = OutAct::Identity;

  int n_layers() const { return static_cast<int>(hidden.size()) + 1; }
  int width_before(int layer) const;  // fan-in of layer (0-based)
  int width_after(int layer) const;   // fan-out of layer
  std::string to_json() const;
  static MlpSpec from_json(const std::string& text);
};

// Fresh parameters: weights W_i ~ U(±sqrt(6/(fan_in+fan_out))), biases zero.
// Entry order (and the flat optimiser order) is W0, b0, W1, b1, ...
ParamStore init_mlp(const MlpSpec& spec, std::uint64_t seed);

// Put every parameter tensor on the tape, in store order.
std::vector<DiffValue> lease(Tape& t, const ParamStore& p, bool trainable = true);

struct MlpTrace {
  DiffValue x;                 // input (in, B)
  DiffValue y;                 // output (out, B)
  std::vector<DiffValue> act;  // tanh outputs per hidden layer (width, B)
};

MlpTrace mlp_forward(Tape& t, const MlpSpec& spec, const std::vector<DiffValue>& theta,
                     DiffValue x);

// ∂y/∂x as a (in, B) tape value; requires out == 1 and identity output.
DiffValue mlp_input_gradient(Tape& t, const MlpSpec& spec, const std::vector<DiffValue>& theta,
                             const MlpTrace& trace);

}  // namespace lab::ad
