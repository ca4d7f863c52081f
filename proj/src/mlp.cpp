#include "lab/mlp.hpp"

#include <json.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

namespace lab::ad {

using nlohmann::ordered_json;

int MlpSpec::width_before(int layer) const {
  return layer == 0 ? in : hidden[layer - 1];
}

int MlpSpec::width_after(int layer) const {
  return layer == n_layers() - 1 ? out : hidden[layer];
}

std::string MlpSpec::to_json() const {
  ordered_json j;
  j["in"] = in;
  j["hidden"] = hidden;
  j["out"] = out;
  j["out_act"] = out_act == OutAct::Identity ? "identity" : "sigmoid";
  return j.dump();
}

MlpSpec MlpSpec::from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  MlpSpec s;
  s.in = j.at("in").get<int>();
  s.hidden = j.at("hidden").get<std::vector<int>>();
  s.out = j.at("out").get<int>();
  const std::string act = j.at("out_act").get<std::string>();
  if (act == "identity")
    s.out_act = OutAct::Identity;
  else if (act == "sigmoid")
    s.out_act = OutAct::Sigmoid;
  else
    throw std::invalid_argument("MlpSpec: unknown output activation " + act);
  return s;
}

ParamStore init_mlp(const MlpSpec& spec, std::uint64_t seed) {
  if (spec.in <= 0 || spec.out <= 0)
    throw std::invalid_argument("init_mlp: input and output widths must be positive");
  for (int w : spec.hidden)
    if (w <= 0) throw std::invalid_argument("init_mlp: hidden widths must be positive");

  std::mt19937_64 rng(seed);
  ParamStore p;
  for (int layer = 0; layer < spec.n_layers(); ++layer) {
    const int fan_in = spec.width_before(layer);
    const int fan_out = spec.width_after(layer);
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-a, a);
    Tensor w(fan_out, fan_in);
    for (double& x : w.data) x = u(rng);
    p.add("W" + std::to_string(layer), std::move(w));
    p.add("b" + std::to_string(layer), Tensor::zeros(fan_out, 1));
  }
  return p;
}

std::vector<DiffValue> lease(Tape& t, const ParamStore& p, bool trainable) {
  std::vector<DiffValue> out;
  out.reserve(p.entries.size());
  for (const auto& e : p.entries) out.push_back(t.param(e.value, trainable));
  return out;
}

MlpTrace mlp_forward(Tape& t, const MlpSpec& spec, const std::vector<DiffValue>& theta,
                     DiffValue x) {
  if (static_cast<int>(theta.size()) != 2 * spec.n_layers())
    throw std::logic_error("mlp_forward: parameter count does not match spec");
  if (t.val(x).rows != spec.in)
    throw std::invalid_argument("mlp_forward: input rows " + t.val(x).shape_str() +
                                " do not match spec input width " + std::to_string(spec.in));

  MlpTrace trace;
  trace.x = x;
  DiffValue a = x;
  for (int layer = 0; layer < spec.n_layers(); ++layer) {
    const DiffValue w = theta[2 * layer];
    const DiffValue b = theta[2 * layer + 1];
    if (t.val(w).rows != spec.width_after(layer) || t.val(w).cols != spec.width_before(layer))
      throw std::invalid_argument("mlp_forward: weight shape mismatch at layer W" +
                                  std::to_string(layer));
    DiffValue z = add_col(t, matmul(t, w, a), b);
    if (layer < spec.n_layers() - 1) {
      a = tanh(t, z);
      trace.act.push_back(a);
    } else {
      a = spec.out_act == OutAct::Sigmoid ? sigmoid(t, z) : z;
    }
  }
  trace.y = a;
  return trace;
}

DiffValue mlp_input_gradient(Tape& t, const MlpSpec& spec, const std::vector<DiffValue>& theta,
                             const MlpTrace& trace) {
  if (spec.out != 1 || spec.out_act != OutAct::Identity)
    throw std::logic_error(
        "mlp_input_gradient: defined for scalar identity-output networks only");
  const int batch = t.val(trace.x).cols;
  const int last = spec.n_layers() - 1;

  // Seed ∂y/∂z_last = 1 for each column, then walk the layers backwards:
  //   u_i  = (Wᵀ_{i+1} u_{i+1}) ⊙ (1 − a_i²)
  //   ∂y/∂x = Wᵀ_0 u_0
  DiffValue u = t.constant(Tensor::full(1, batch, 1.0));
  for (int layer = last; layer >= 1; --layer) {
    DiffValue da = matmul_tn(t, theta[2 * layer], u);  // (width_{layer-1}, B)
    DiffValue a = trace.act[layer - 1];
    const Tensor& av = t.val(a);
    DiffValue ones = t.constant(Tensor::full(av.rows, av.cols, 1.0));
    u = hadamard(t, da, sub(t, ones, hadamard(t, a, a)));
  }
  return matmul_tn(t, theta[0], u);
}

}  // namespace lab::ad
