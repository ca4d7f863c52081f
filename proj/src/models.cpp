#include "lab/models.hpp"

#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "lab/errors.hpp"
#include "lab/rng.hpp"

namespace lab::models {

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Cdl: return "cdl";
    case ModelKind::ResNet: return "resnet";
    case ModelKind::ResNetContact: return "resnet_contact";
    case ModelKind::Vin: return "vin";
  }
  throw std::logic_error("lab::model_name: unknown kind");
}

ModelKind model_from_name(const std::string& name) {
  if (name == "cdl") return ModelKind::Cdl;
  if (name == "resnet") return ModelKind::ResNet;
  if (name == "resnet_contact") return ModelKind::ResNetContact;
  if (name == "vin") return ModelKind::Vin;
  throw ConfigError("unknown model name: " + name);
}

CdlModel make_cdl_model(const mech::SystemSpec& scene, const std::vector<int>& hidden,
                        std::uint64_t seed) {
  scene.validate();
  CdlModel m;
  m.scene = scene;
  m.pot_spec = {scene.K, hidden, 1, ad::OutAct::Identity};
  m.con_spec = {2 * scene.K, hidden, scene.K, ad::OutAct::Sigmoid};
  m.pot = ad::init_mlp(m.pot_spec, mix_seed(seed, 0x706F7465));
  m.con = ad::init_mlp(m.con_spec, mix_seed(seed, 0x636F6E74));
  return m;
}

ResNetModel make_resnet_model(const mech::SystemSpec& scene, bool contact_aware,
                              const std::vector<int>& hidden, std::uint64_t seed) {
  scene.validate();
  ResNetModel m;
  m.scene = scene;
  m.contact_aware = contact_aware;
  const int in = 2 * scene.K + (contact_aware ? scene.K : 0);
  m.net_spec = {in, hidden, 2 * scene.K, ad::OutAct::Identity};
  m.net = ad::init_mlp(m.net_spec, mix_seed(seed, 0x6E657477));
  if (contact_aware) {
    m.head_spec = {2 * scene.K, hidden, scene.K, ad::OutAct::Sigmoid};
    m.head = ad::init_mlp(m.head_spec, mix_seed(seed, 0x68656164));
  }
  return m;
}

VinModel make_vin_model(const mech::SystemSpec& scene, const std::vector<int>& hidden,
                        std::uint64_t seed) {
  scene.validate();
  VinModel m;
  m.scene = scene;
  m.pot_spec = {scene.K, hidden, 1, ad::OutAct::Identity};
  m.pot = ad::init_mlp(m.pot_spec, mix_seed(seed, 0x706F7465));
  return m;
}

ad::DiffValue learned_force(ad::Tape& t, const ad::MlpSpec& spec,
                            const std::vector<ad::DiffValue>& theta, ad::DiffValue Q) {
  const ad::MlpTrace trace = ad::mlp_forward(t, spec, theta, Q);
  return ad::neg(t, ad::mlp_input_gradient(t, spec, theta, trace));
}

ad::DiffValue contact_probs_tape(ad::Tape& t, const ad::MlpSpec& spec,
                                 const std::vector<ad::DiffValue>& theta, ad::DiffValue Q,
                                 ad::DiffValue Qdot) {
  return ad::mlp_forward(t, spec, theta, ad::vstack(t, Q, Qdot)).y;
}

namespace {

Tensor threshold_flags(const Tensor& p) {
  Tensor f(p.rows, p.cols);
  for (std::size_t i = 0; i < p.data.size(); ++i) f.data[i] = p.data[i] >= 0.5 ? 1.0 : 0.0;
  return f;
}

}  // namespace

integ::Rollout<integ::TapeEngine> cdl_rollout_tape(ad::Tape& t, const CdlModel& m,
                                                   const std::vector<ad::DiffValue>& theta_pot,
                                                   const std::vector<ad::DiffValue>& theta_con,
                                                   const Tensor& Q0, const Tensor& V0,
                                                   int n_steps, const GateSource& gates) {
  integ::TapeEngine e(t);
  const auto ctx = integ::make_cdl_context(e, m.scene);
  auto force = [&](integ::TapeEngine& te, ad::DiffValue q) {
    return learned_force(*te.tape, m.pot_spec, theta_pot, q);
  };
  auto gate = [&](integ::TapeEngine& te, ad::DiffValue qn, ad::DiffValue vhalf, int n) {
    if (gates.recorded) return te.constant((*gates.recorded)[static_cast<std::size_t>(n)]);
    const ad::DiffValue probs = contact_probs_tape(*te.tape, m.con_spec, theta_con, qn, vhalf);
    if (gates.soft) return probs;
    return te.constant(threshold_flags(te.tape->val(probs)));
  };
  return integ::cdl_rollout(e, m.scene, ctx, t.constant(Q0), t.constant(V0), n_steps, force,
                            gate);
}

integ::Rollout<integ::TapeEngine> vin_rollout_tape(ad::Tape& t, const VinModel& m,
                                                   const std::vector<ad::DiffValue>& theta_pot,
                                                   const Tensor& Q0, const Tensor& V0,
                                                   int n_steps) {
  integ::TapeEngine e(t);
  const auto ctx = integ::make_cdl_context(e, m.scene);
  auto force = [&](integ::TapeEngine& te, ad::DiffValue q) {
    return learned_force(*te.tape, m.pot_spec, theta_pot, q);
  };
  return integ::vv_rollout(e, m.scene, ctx, t.constant(Q0), t.constant(V0), n_steps, force);
}

ResnetRollout resnet_rollout_tape(ad::Tape& t, const ResNetModel& m,
                                  const std::vector<ad::DiffValue>& theta_net,
                                  const std::vector<ad::DiffValue>& theta_head, const Tensor& s0,
                                  int n_steps, const std::vector<Tensor>* recorded,
                                  const Tensor* c0) {
  if (s0.rows != 2 * m.scene.K)
    throw std::invalid_argument("lab::resnet_rollout_tape: s0 must stack Q over Qdot");
  ResnetRollout out;
  ad::DiffValue s = t.constant(s0);
  out.s.push_back(s);

  Tensor cur_flags;
  const bool self_predict = m.contact_aware && recorded == nullptr;
  if (self_predict) {
    if (!c0)
      throw std::invalid_argument("lab::resnet_rollout_tape: self-predicted flags need c0");
    cur_flags = *c0;
  }

  for (int n = 0; n < n_steps; ++n) {
    ad::DiffValue input = s;
    if (m.contact_aware) {
      const Tensor& fl = recorded ? (*recorded)[static_cast<std::size_t>(n)] : cur_flags;
      input = ad::vstack(t, s, t.constant(fl));
    }
    const ad::DiffValue s_next = ad::add(t, s, ad::mlp_forward(t, m.net_spec, theta_net, input).y);
    if (self_predict) {
      // c_{n+1} predicted from the pre-update state, chained into step n+1.
      const ad::DiffValue probs = ad::mlp_forward(t, m.head_spec, theta_head, s).y;
      out.head_probs.push_back(probs);
      cur_flags = threshold_flags(t.val(probs));
    }
    if (!integ::detail::state_ok(t.val(s_next), t.val(s_next), 1e6)) {
      out.diverged = true;
      break;
    }
    out.s.push_back(s_next);
    s = s_next;
  }
  return out;
}

namespace {

mech::ContactSignal column_flags(const Tensor& flags, int col) {
  mech::ContactSignal c(static_cast<std::size_t>(flags.rows));
  for (int k = 0; k < flags.rows; ++k) c[static_cast<std::size_t>(k)] = flags(k, col) > 0.5 ? 1 : 0;
  return c;
}

}  // namespace

mech::Trajectory cdl_forecast(const CdlModel& m, const mech::StaggeredState& y0,
                              const mech::ContactSignal& c0, int n_steps) {
  if (static_cast<int>(c0.size()) != m.scene.K)
    throw std::invalid_argument("lab::cdl_forecast: c0 must have K entries");
  ad::Tape t;
  const auto theta_pot = ad::lease(t, m.pot, false);
  const auto theta_con = ad::lease(t, m.con, false);
  const auto roll =
      cdl_rollout_tape(t, m, theta_pot, theta_con, y0.Q, y0.Qdot, n_steps, GateSource{});

  mech::Trajectory tr;
  tr.h = m.scene.h;
  const int n = roll.n_points();
  tr.states.push_back({t.val(roll.Q[0]), t.val(roll.Vel[0])});
  tr.contacts.push_back(c0);
  if (n > 1) {
    // The gates queried ĉ at (Q_{i}, Q̇_{i-1/2}); re-evaluate the same inputs
    // in one batch to record the per-point predictions.
    Tensor Qs(m.scene.K, n - 1), Vs(m.scene.K, n - 1);
    for (int i = 1; i < n; ++i)
      for (int k = 0; k < m.scene.K; ++k) {
        Qs(k, i - 1) = t.val(roll.Q[static_cast<std::size_t>(i)])(k, 0);
        Vs(k, i - 1) = t.val(roll.Vel[static_cast<std::size_t>(i - 1)])(k, 0);
      }
    const ContactPrediction pred = contact_predict(m, Qs, Vs);
    for (int i = 1; i < n; ++i) {
      tr.states.push_back({t.val(roll.Q[static_cast<std::size_t>(i)]),
                           t.val(roll.Vel[static_cast<std::size_t>(i)])});
      tr.contacts.push_back(column_flags(pred.flags, i - 1));
    }
  }
  return tr;
}

mech::Trajectory vin_forecast(const VinModel& m, const mech::StaggeredState& y0, int n_steps) {
  ad::Tape t;
  const auto theta_pot = ad::lease(t, m.pot, false);
  const auto roll = vin_rollout_tape(t, m, theta_pot, y0.Q, y0.Qdot, n_steps);
  mech::Trajectory tr;
  tr.h = m.scene.h;
  for (int i = 0; i < roll.n_points(); ++i) {
    tr.states.push_back({t.val(roll.Q[static_cast<std::size_t>(i)]),
                         t.val(roll.Vel[static_cast<std::size_t>(i)])});
    tr.contacts.emplace_back(static_cast<std::size_t>(m.scene.K), 0);
  }
  return tr;
}

mech::Trajectory resnet_forecast(const ResNetModel& m, const mech::StaggeredState& y0,
                                 const mech::ContactSignal& c0, int n_steps) {
  if (static_cast<int>(c0.size()) != m.scene.K)
    throw std::invalid_argument("lab::resnet_forecast: c0 must have K entries");
  ad::Tape t;
  const auto theta_net = ad::lease(t, m.net, false);
  const auto theta_head = ad::lease(t, m.head, false);
  Tensor c0t(m.scene.K, 1);
  for (int k = 0; k < m.scene.K; ++k) c0t(k, 0) = c0[static_cast<std::size_t>(k)];
  const auto roll = resnet_rollout_tape(t, m, theta_net, theta_head,
                                        vstack(y0.Q, y0.Qdot), n_steps, nullptr, &c0t);

  mech::Trajectory tr;
  tr.h = m.scene.h;
  for (int i = 0; i < roll.n_points(); ++i) {
    const Tensor& s = t.val(roll.s[static_cast<std::size_t>(i)]);
    tr.states.push_back({top_rows(s, m.scene.K), bottom_rows(s, m.scene.K)});
    if (i == 0)
      tr.contacts.push_back(c0);
    else if (m.contact_aware)
      tr.contacts.push_back(
          column_flags(threshold_flags(t.val(roll.head_probs[static_cast<std::size_t>(i - 1)])), 0));
    else
      tr.contacts.emplace_back(static_cast<std::size_t>(m.scene.K), 0);
  }
  return tr;
}

ContactPrediction contact_predict(const CdlModel& m, const Tensor& Q, const Tensor& Qdot) {
  ad::Tape t;
  const auto theta = ad::lease(t, m.con, false);
  const ad::DiffValue probs =
      contact_probs_tape(t, m.con_spec, theta, t.constant(Q), t.constant(Qdot));
  ContactPrediction out;
  out.probs = t.val(probs);
  out.flags = threshold_flags(out.probs);
  return out;
}

// --- checkpoints ---------------------------------------------------------------

namespace {

nlohmann::ordered_json params_bundle(const ad::ParamStore& p, const ad::MlpSpec& spec) {
  return nlohmann::ordered_json::parse(ad::params_to_json(p, spec.to_json()));
}

void parse_bundle(const nlohmann::ordered_json& j, ad::ParamStore* store, ad::MlpSpec* spec) {
  std::string spec_json;
  *store = ad::params_from_json(j.dump(), &spec_json);
  *spec = ad::MlpSpec::from_json(spec_json);
}

nlohmann::ordered_json checkpoint_shell(const char* kind, const std::string& config_hash,
                                        const mech::SystemSpec& scene) {
  nlohmann::ordered_json j;
  j["kind"] = kind;
  j["config_hash"] = config_hash;
  j["scene"] = nlohmann::ordered_json::parse(scene.to_json());
  return j;
}

nlohmann::ordered_json parse_checkpoint(const std::string& text, const char* want_a,
                                        const char* want_b = nullptr) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed model checkpoint: ") + ex.what());
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != want_a && (!want_b || kind != want_b))
    throw ConfigError("model checkpoint kind mismatch: got '" + kind + "'");
  return j;
}

}  // namespace

std::string cdl_to_json(const CdlModel& m, const std::string& config_hash) {
  nlohmann::ordered_json j = checkpoint_shell("cdl", config_hash, m.scene);
  j["potential"] = params_bundle(m.pot, m.pot_spec);
  j["contact"] = params_bundle(m.con, m.con_spec);
  return j.dump(2);
}

CdlModel cdl_from_json(const std::string& text) {
  const auto j = parse_checkpoint(text, "cdl");
  CdlModel m;
  m.scene = mech::SystemSpec::from_json(j.at("scene").dump());
  parse_bundle(j.at("potential"), &m.pot, &m.pot_spec);
  parse_bundle(j.at("contact"), &m.con, &m.con_spec);
  return m;
}

std::string resnet_to_json(const ResNetModel& m, const std::string& config_hash) {
  nlohmann::ordered_json j =
      checkpoint_shell(m.contact_aware ? "resnet_contact" : "resnet", config_hash, m.scene);
  j["net"] = params_bundle(m.net, m.net_spec);
  if (m.contact_aware) j["head"] = params_bundle(m.head, m.head_spec);
  return j.dump(2);
}

ResNetModel resnet_from_json(const std::string& text) {
  const auto j = parse_checkpoint(text, "resnet", "resnet_contact");
  ResNetModel m;
  m.contact_aware = j.at("kind").get<std::string>() == "resnet_contact";
  m.scene = mech::SystemSpec::from_json(j.at("scene").dump());
  parse_bundle(j.at("net"), &m.net, &m.net_spec);
  if (m.contact_aware) parse_bundle(j.at("head"), &m.head, &m.head_spec);
  return m;
}

std::string vin_to_json(const VinModel& m, const std::string& config_hash) {
  nlohmann::ordered_json j = checkpoint_shell("vin", config_hash, m.scene);
  j["potential"] = params_bundle(m.pot, m.pot_spec);
  return j.dump(2);
}

VinModel vin_from_json(const std::string& text) {
  const auto j = parse_checkpoint(text, "vin");
  VinModel m;
  m.scene = mech::SystemSpec::from_json(j.at("scene").dump());
  parse_bundle(j.at("potential"), &m.pot, &m.pot_spec);
  return m;
}

}  // namespace lab::models
