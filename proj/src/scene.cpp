#include "lab/scene.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "lab/errors.hpp"

namespace lab::mech {

std::string scene_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::Pendulum: return "pendulum";
    case SceneKind::Ball: return "ball";
    case SceneKind::Cradle: return "cradle";
  }
  throw std::logic_error("lab::scene_name: bad enum");
}

SceneKind scene_from_name(const std::string& name) {
  if (name == "pendulum") return SceneKind::Pendulum;
  if (name == "ball") return SceneKind::Ball;
  if (name == "cradle") return SceneKind::Cradle;
  throw ConfigError("unknown scene '" + name + "' (expected pendulum, ball, or cradle)");
}

double SystemSpec::inertia(int k) const {
  const double m = masses.at(static_cast<std::size_t>(k));
  return kind == SceneKind::Ball ? m : m * length * length;
}

Tensor SystemSpec::inertia_diag() const {
  Tensor d = Tensor::zeros(K, K);
  for (int k = 0; k < K; ++k) d(k, k) = inertia(k);
  return d;
}

Tensor SystemSpec::inv_inertia_diag() const {
  Tensor d = Tensor::zeros(K, K);
  for (int k = 0; k < K; ++k) d(k, k) = 1.0 / inertia(k);
  return d;
}

void SystemSpec::validate() const {
  if (K < 1) throw ConfigError("scene: K must be >= 1");
  const auto n = static_cast<std::size_t>(K);
  if (masses.size() != n || q0.size() != n || v0.size() != n)
    throw ConfigError("scene: masses/q0/v0 must each have K entries");
  for (double m : masses)
    if (!(m > 0.0)) throw ConfigError("scene: masses must be positive");
  if (!(h > 0.0)) throw ConfigError("scene: step size h must be positive");
  if (e < 0.0 || e > 1.0) throw ConfigError("scene: restitution e must lie in [0, 1]");
  if (kind != SceneKind::Ball && !(length > 0.0))
    throw ConfigError("scene: arm length must be positive");
  if (kind == SceneKind::Cradle && K != 2)
    throw ConfigError("scene: cradle needs exactly 2 bodies");
  if (kind != SceneKind::Cradle && K != 1)
    throw ConfigError("scene: " + scene_name(kind) + " needs exactly 1 body");
}

std::string SystemSpec::to_json() const {
  nlohmann::ordered_json j;
  j["scene"] = scene_name(kind);
  j["K"] = K;
  j["masses"] = masses;
  j["e"] = e;
  j["g"] = g;
  j["length"] = length;
  j["floor"] = floor;
  j["h"] = h;
  j["q0"] = q0;
  j["v0"] = v0;
  j["projection"] = projection;
  j["approach_guard"] = approach_guard;
  j["position_half_step"] = position_half_step;
  return j.dump(2);
}

SystemSpec SystemSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ConfigError(std::string("scene: bad JSON: ") + ex.what());
  }
  SystemSpec s;
  try {
    s.kind = scene_from_name(j.at("scene").get<std::string>());
    s.K = j.at("K").get<int>();
    s.masses = j.at("masses").get<std::vector<double>>();
    s.e = j.at("e").get<double>();
    s.g = j.at("g").get<double>();
    s.length = j.at("length").get<double>();
    s.floor = j.at("floor").get<double>();
    s.h = j.at("h").get<double>();
    s.q0 = j.at("q0").get<std::vector<double>>();
    s.v0 = j.at("v0").get<std::vector<double>>();
    s.projection = j.at("projection").get<bool>();
    s.approach_guard = j.at("approach_guard").get<bool>();
    s.position_half_step = j.at("position_half_step").get<bool>();
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("scene: missing or mistyped field: ") + ex.what());
  }
  s.validate();
  return s;
}

SystemSpec make_pendulum() {
  SystemSpec s;
  s.kind = SceneKind::Pendulum;
  s.K = 1;
  s.masses = {1.0};
  s.e = 1.0;
  s.g = 9.81;
  s.length = 1.0;
  s.h = 0.02;
  s.q0 = {1.0};
  s.v0 = {0.0};
  s.projection = false;
  s.approach_guard = true;
  return s;
}

SystemSpec make_ball() {
  SystemSpec s;
  s.kind = SceneKind::Ball;
  s.K = 1;
  s.masses = {1.0};
  s.e = 1.0;
  s.g = 9.81;
  s.floor = 0.0;
  s.h = 0.02;
  s.q0 = {10.0};
  s.v0 = {0.0};
  s.projection = false;
  s.approach_guard = true;
  return s;
}

SystemSpec make_cradle() {
  SystemSpec s;
  s.kind = SceneKind::Cradle;
  s.K = 2;
  s.masses = {1.0, 1.0};
  s.e = 1.0;
  s.g = 9.81;
  s.length = 1.0;
  s.h = 0.02;
  // Left arm swings in at 2 rad/s; both arms hang at their shared rest angle.
  s.q0 = {0.0, 0.0};
  s.v0 = {2.0, 0.0};
  s.projection = true;
  s.approach_guard = true;
  return s;
}

Tensor gap(const SystemSpec& spec, const Tensor& Q) {
  if (Q.rows != spec.K) throw std::invalid_argument("lab::gap: Q must have K rows");
  Tensor out(Q.rows, Q.cols);
  switch (spec.kind) {
    case SceneKind::Pendulum: {
      const double inf = std::numeric_limits<double>::infinity();
      for (double& x : out.data) x = inf;
      break;
    }
    case SceneKind::Ball:
      for (int b = 0; b < Q.cols; ++b) out(0, b) = Q(0, b) - spec.floor;
      break;
    case SceneKind::Cradle:
      // One pair gap, reported on both rows: arms touch when the left one
      // (body 1) has swung up to the right one (body 2).
      for (int b = 0; b < Q.cols; ++b) {
        const double d = Q(1, b) - Q(0, b);
        out(0, b) = d;
        out(1, b) = d;
      }
      break;
  }
  return out;
}

std::vector<int> contact_flags(const SystemSpec& spec, const Tensor& Q) {
  if (Q.cols != 1) throw std::invalid_argument("lab::contact_flags: expected a single state column");
  const Tensor d = gap(spec, Q);
  std::vector<int> flags(static_cast<std::size_t>(spec.K));
  for (int k = 0; k < spec.K; ++k) flags[static_cast<std::size_t>(k)] = d(k, 0) <= 0.0 ? 1 : 0;
  return flags;
}

Tensor build_L(const SystemSpec& spec) {
  switch (spec.kind) {
    case SceneKind::Pendulum: return Tensor(0, 1);
    case SceneKind::Ball: return Tensor::col({1.0});
    case SceneKind::Cradle: return Tensor::col({1.0, -1.0});
  }
  throw std::logic_error("lab::build_L: bad enum");
}

Tensor build_A(const SystemSpec& spec, const std::vector<int>& flags) {
  if (flags.size() != static_cast<std::size_t>(spec.K))
    throw std::invalid_argument("lab::build_A: flags must have K entries");
  Tensor A = Tensor::zeros(spec.K, spec.K);
  switch (spec.kind) {
    case SceneKind::Pendulum:
      break;
    case SceneKind::Ball:
      if (flags[0]) A(0, 0) = -1.0;
      break;
    case SceneKind::Cradle:
      if (flags[0] != flags[1])
        throw std::invalid_argument("lab::build_A: inconsistent cradle pair flags");
      if (flags[0]) {
        A(0, 0) = -1.0;
        A(0, 1) = 1.0;
        A(1, 0) = 1.0;
        A(1, 1) = -1.0;
      }
      break;
  }
  return A;
}

Tensor build_H(const SystemSpec& spec, const Tensor& A) {
  if (A.rows != spec.K || A.cols != spec.K)
    throw std::invalid_argument("lab::build_H: A must be (K,K)");
  const Tensor G = matmul(matmul(A, spec.inv_inertia_diag()), transpose(A));
  Tensor H = Tensor::zeros(spec.K, spec.K);
  for (std::size_t i = 0; i < G.data.size(); ++i)
    if (G.data[i] != 0.0) H.data[i] = 1.0 / G.data[i];
  return H;
}

Tensor true_force(const SystemSpec& spec, const Tensor& Q) {
  if (Q.rows != spec.K) throw std::invalid_argument("lab::true_force: Q must have K rows");
  Tensor F(Q.rows, Q.cols);
  if (spec.kind == SceneKind::Ball) {
    const double f = -spec.masses[0] * spec.g;
    for (double& x : F.data) x = f;
  } else {
    for (int k = 0; k < spec.K; ++k) {
      const double mgl = spec.masses[static_cast<std::size_t>(k)] * spec.g * spec.length;
      for (int b = 0; b < Q.cols; ++b) F(k, b) = -mgl * std::sin(Q(k, b));
    }
  }
  return F;
}

double potential(const SystemSpec& spec, const Tensor& Q) {
  if (Q.rows != spec.K || Q.cols != 1)
    throw std::invalid_argument("lab::potential: expected a (K,1) state");
  double v = 0.0;
  if (spec.kind == SceneKind::Ball) {
    v = spec.masses[0] * spec.g * Q(0, 0);
  } else {
    for (int k = 0; k < spec.K; ++k)
      v += spec.masses[static_cast<std::size_t>(k)] * spec.g * spec.length *
           (1.0 - std::cos(Q(k, 0)));
  }
  return v;
}

double kinetic(const SystemSpec& spec, const Tensor& Qdot) {
  if (Qdot.rows != spec.K || Qdot.cols != 1)
    throw std::invalid_argument("lab::kinetic: expected a (K,1) velocity");
  double t = 0.0;
  for (int k = 0; k < spec.K; ++k) t += 0.5 * spec.inertia(k) * Qdot(k, 0) * Qdot(k, 0);
  return t;
}

double energy(const SystemSpec& spec, const Tensor& Q, const Tensor& Qdot) {
  return kinetic(spec, Qdot) + potential(spec, Q);
}

}  // namespace lab::mech
